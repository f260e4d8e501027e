"""CNF formulas, DIMACS input, and the compilation of CNF into an LG sequent.

Clause ``i`` is encoded by the atom ``p<i>``.  For variable ``j`` and truth
value ``t`` the product ``E_j(t)`` has one factor per clause: the factor is
``p_i (/) (p_i (\\) p_i)`` exactly when the literal made true by ``x_j = t``
occurs in clause ``i``.  Each ``F_j`` is the meet of ``E_j(1)`` and
``E_j(0)`` with join ``H_j = p_1 * (p_2 * ...)``; the right-hand side
``G_n`` peels off one ``(/) (p_i (\\) p_i)`` per clause.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce as _fold

from .core import Atom, Compound, Formula, Op, Sequent, inp, out

__all__ = [
    "Literal", "CnfFormula", "DimacsError", "parse_dimacs", "to_dimacs",
    "E_atom", "E_formula", "H", "G", "F", "meet_type", "reduce", "product",
    "clause_atom", "marked",
]


@dataclass(frozen=True)
class Literal:
    var: int
    sign: int  # 1 for x_j, 0 for its negation

    @classmethod
    def from_int(cls, k: int) -> Literal:
        return cls(abs(k), 1 if k > 0 else 0)

    def to_int(self) -> int:
        return self.var if self.sign else -self.var


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError("a CNF needs at least one variable")
        if not self.clauses:
            raise ValueError("a CNF needs at least one clause")
        for i, clause in enumerate(self.clauses, 1):
            if not clause:
                raise ValueError(f"clause {i} is empty")
            for lit in clause:
                if not 1 <= lit.var <= self.num_vars:
                    raise ValueError(f"clause {i} mentions x{lit.var}, outside 1..{self.num_vars}")
                if lit.sign not in (0, 1):
                    raise ValueError(f"bad literal sign {lit.sign}")

    @classmethod
    def from_ints(cls, num_vars: int, clauses) -> CnfFormula:
        return cls(num_vars, tuple(tuple(Literal.from_int(k) for k in c) for c in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def has_literal(self, i: int, j: int, t: int) -> bool:
        """Whether the literal made true by x_j = t occurs in clause i (1-based)."""
        return Literal(j, t) in self.clauses[i - 1]

    def satisfied_by(self, values) -> bool:
        return all(any(values[lit.var - 1] == lit.sign for lit in clause)
                   for clause in self.clauses)

    def as_ints(self) -> list[list[int]]:
        return [[lit.to_int() for lit in c] for c in self.clauses]


class DimacsError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise DimacsError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"malformed header {line!r}", lineno) from None
            if header[0] < 1 or header[1] < 1:
                raise DimacsError("header needs at least one variable and one clause", lineno)
            continue
        if header is None:
            raise DimacsError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                k = int(tok)
            except ValueError:
                raise DimacsError(f"not an integer: {tok!r}", lineno) from None
            if k == 0:
                if not current:
                    raise DimacsError("empty clause", lineno)
                clauses.append(current)
                current = []
            elif abs(k) > header[0]:
                raise DimacsError(f"variable {abs(k)} out of range 1..{header[0]}", lineno)
            else:
                current.append(k)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(header[0], clauses)


def to_dimacs(cnf: CnfFormula) -> str:
    lines = [f"p cnf {cnf.num_vars} {cnf.num_clauses}"]
    lines += [" ".join(map(str, c)) + " 0" for c in cnf.as_ints()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# The families of types
# ---------------------------------------------------------------------------

def product(factors: list[Formula]) -> Formula:
    """Right-nested product ``a * (b * (... * z))``; a single factor stands alone."""
    return _fold(lambda acc, f: Compound(Op.PROD, f, acc), reversed(factors[:-1]), factors[-1])


def clause_atom(i: int) -> Atom:
    return Atom(f"p{i}")


def marked(i: int) -> Formula:
    """``p_i (/) (p_i (\\) p_i)``: the clause-i marker, derivable to ``p_i``."""
    p = clause_atom(i)
    return Compound(Op.RDIFF, p, Compound(Op.LDIFF, p, p))


def E_atom(i: int, j: int, t: int, cnf: CnfFormula) -> Formula:
    return marked(i) if cnf.has_literal(i, j, t) else clause_atom(i)


def E_formula(j: int, t: int, cnf: CnfFormula) -> Formula:
    return product([E_atom(i, j, t, cnf) for i in range(1, cnf.num_clauses + 1)])


def H(j: int, cnf: CnfFormula) -> Formula:
    return product([clause_atom(i) for i in range(1, cnf.num_clauses + 1)])


def meet_type(a: Formula, b: Formula, c: Formula) -> Formula:
    """``(a / ((c / c) \\ c)) * ((c / c) \\ b)``, the meet of a and b over join c."""
    cc = Compound(Op.OVER, c, c)
    return Compound(Op.PROD,
                    Compound(Op.OVER, a, Compound(Op.UNDER, cc, c)),
                    Compound(Op.UNDER, cc, b))


def F(j: int, cnf: CnfFormula) -> Formula:
    return meet_type(E_formula(j, 1, cnf), E_formula(j, 0, cnf), H(j, cnf))


def G(i: int, cnf: CnfFormula) -> Formula:
    g = product([H(j, cnf) for j in range(1, cnf.num_vars + 1)])
    for k in range(1, i + 1):
        p = clause_atom(k)
        g = Compound(Op.RDIFF, g, Compound(Op.LDIFF, p, p))
    return g


def reduce(cnf: CnfFormula) -> Sequent:
    """The sequent ``F_1 * (F_2 * (...)) |- G_n``; derivable iff cnf is satisfiable."""
    lhs = product([F(j, cnf) for j in range(1, cnf.num_vars + 1)])
    return Sequent(inp(lhs), out(G(cnf.num_clauses, cnf)))
