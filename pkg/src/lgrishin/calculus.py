"""Rule system of LG: schemas, backward enumeration, display closure, checking.

Two independent routes to the same rules live here.  ``apply_forward``
matches a derivation step against a declarative schema table written in
the concrete syntax; ``backward_steps`` computes premises procedurally from
a goal.  Their agreement is tested as a property.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .core import (
    Atom, Compound, Leaf, Meta, Node, Op, Sequent, Structure,
    census, inp, out, parse_schema,
)

__all__ = [
    "RuleLabel", "Derivation", "CheckReport", "Mismatch",
    "backward_steps", "apply_forward", "display_closure", "display_paths",
    "canonical", "check", "ClosureCapExceeded",
]


class RuleLabel(Enum):
    Ax = "Ax"
    Cut = "Cut"
    ResOver = "ResOver"
    ResUnder = "ResUnder"
    ResOverInv = "ResOverInv"
    ResUnderInv = "ResUnderInv"
    DResRDiff = "DResRDiff"
    DResLDiff = "DResLDiff"
    DResRDiffInv = "DResRDiffInv"
    DResLDiffInv = "DResLDiffInv"
    GrishinRDiffOver = "GrishinRDiffOver"
    GrishinRDiffUnder = "GrishinRDiffUnder"
    GrishinLDiffOver = "GrishinLDiffOver"
    GrishinLDiffUnder = "GrishinLDiffUnder"
    TensorL = "TensorL"
    TensorR = "TensorR"
    CoprodL = "CoprodL"
    CoprodR = "CoprodR"
    OverL = "OverL"
    OverR = "OverR"
    UnderL = "UnderL"
    UnderR = "UnderR"
    RDiffL = "RDiffL"
    RDiffR = "RDiffR"
    LDiffL = "LDiffL"
    LDiffR = "LDiffR"

    @property
    def arity(self) -> int:
        return len(SCHEMAS[self][0])

    @property
    def kind(self) -> str:
        """One of 'axiom', 'cut', 'display', 'grishin', 'logical'."""
        return _KIND[self]


R = RuleLabel

DISPLAY = frozenset({R.ResOver, R.ResUnder, R.ResOverInv, R.ResUnderInv,
                     R.DResRDiff, R.DResLDiff, R.DResRDiffInv, R.DResLDiffInv})
GRISHIN = frozenset({R.GrishinRDiffOver, R.GrishinRDiffUnder,
                     R.GrishinLDiffOver, R.GrishinLDiffUnder})
INVERSE = {
    R.ResOver: R.ResOverInv, R.ResOverInv: R.ResOver,
    R.ResUnder: R.ResUnderInv, R.ResUnderInv: R.ResUnder,
    R.DResRDiff: R.DResRDiffInv, R.DResRDiffInv: R.DResRDiff,
    R.DResLDiff: R.DResLDiffInv, R.DResLDiffInv: R.DResLDiff,
}

# Rule schemas: (premises, conclusion).  X, Y, P, Q range over
# structures; A, B over formulas.
_SCHEMA_TEXT: dict[RuleLabel, tuple[list[str], str]] = {
    R.Ax: ([], "A |- A"),
    R.Cut: (["X |- A", "A |- P"], "X |- P"),
    R.ResOver: (["X |- P ./. Y"], "X .*. Y |- P"),
    R.ResUnder: (["Y |- X .\\. P"], "X .*. Y |- P"),
    R.ResOverInv: (["X .*. Y |- P"], "X |- P ./. Y"),
    R.ResUnderInv: (["X .*. Y |- P"], "Y |- X .\\. P"),
    R.DResRDiff: (["X .(/). Q |- P"], "X |- P .(+). Q"),
    R.DResLDiff: (["P .(\\). X |- Q"], "X |- P .(+). Q"),
    R.DResRDiffInv: (["X |- P .(+). Q"], "X .(/). Q |- P"),
    R.DResLDiffInv: (["X |- P .(+). Q"], "P .(\\). X |- Q"),
    R.GrishinRDiffOver: (["X .*. Y |- P .(+). Q"], "X .(/). Q |- P ./. Y"),
    R.GrishinRDiffUnder: (["X .*. Y |- P .(+). Q"], "Y .(/). Q |- X .\\. P"),
    R.GrishinLDiffOver: (["X .*. Y |- P .(+). Q"], "P .(\\). X |- Q ./. Y"),
    R.GrishinLDiffUnder: (["X .*. Y |- P .(+). Q"], "P .(\\). Y |- X .\\. Q"),
    R.TensorL: (["A .*. B |- P"], "A * B |- P"),
    R.CoprodR: (["X |- B .(+). A"], "X |- B (+) A"),
    R.OverR: (["X |- A ./. B"], "X |- A / B"),
    R.LDiffL: (["B .(\\). A |- P"], "B (\\) A |- P"),
    R.UnderR: (["X |- B .\\. A"], "X |- B \\ A"),
    R.RDiffL: (["A .(/). B |- P"], "A (/) B |- P"),
    R.TensorR: (["X |- A", "Y |- B"], "X .*. Y |- A * B"),
    R.CoprodL: (["B |- P", "A |- Q"], "B (+) A |- P .(+). Q"),
    R.OverL: (["X |- A", "B |- P"], "B / A |- P ./. X"),
    R.LDiffR: (["X |- B", "A |- P"], "P .(\\). X |- A (\\) B"),
    R.UnderL: (["X |- A", "B |- P"], "A \\ B |- X .\\. P"),
    R.RDiffR: (["X |- B", "A |- P"], "X .(/). P |- B (/) A"),
}

SCHEMAS = {label: ([parse_schema(p) for p in prem], parse_schema(concl))
           for label, (prem, concl) in _SCHEMA_TEXT.items()}

_KIND = {label: ("axiom" if label is R.Ax else "cut" if label is R.Cut
                 else "display" if label in DISPLAY else "grishin" if label in GRISHIN
                 else "logical")
         for label in RuleLabel}

# customary rule names, used by the LaTeX exporter
RULE_TEX = {
    R.Ax: "Ax", R.Cut: "Cut",
    R.ResOver: "r", R.ResUnder: "r", R.ResOverInv: "r", R.ResUnderInv: "r",
    R.DResRDiff: "dr", R.DResLDiff: "dr", R.DResRDiffInv: "dr", R.DResLDiffInv: "dr",
    R.GrishinRDiffOver: r"d{\oslash}/", R.GrishinRDiffUnder: r"d{\oslash}\backslash",
    R.GrishinLDiffOver: r"d{\obslash}/", R.GrishinLDiffUnder: r"d{\obslash}\backslash",
    R.TensorL: r"{\otimes}L", R.TensorR: r"{\otimes}R",
    R.CoprodL: r"{\oplus}L", R.CoprodR: r"{\oplus}R",
    R.OverL: "/L", R.OverR: "/R", R.UnderL: r"{\backslash}L", R.UnderR: r"{\backslash}R",
    R.RDiffL: r"{\oslash}L", R.RDiffR: r"{\oslash}R",
    R.LDiffL: r"{\obslash}L", R.LDiffR: r"{\obslash}R",
}


# ---------------------------------------------------------------------------
# Forward checking by schema matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mismatch:
    """Why a rule instance failed; ``where`` names the offending sequent."""

    where: str
    message: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


def _match_formula(pat, f, env: dict) -> str | None:
    if isinstance(pat, Meta):
        bound = env.get(pat.name)
        if bound is None:
            env[pat.name] = f
            return None
        return None if bound == f else f"{pat.name} is {bound.text} elsewhere but {f.text} here"
    if isinstance(pat, (Atom, Compound)):
        return None if pat == f else f"expected {pat.text}, found {f.text}"
    _, op, pl, pr = pat
    if type(f) is not Compound or f.op is not op:
        return f"expected a formula with main connective {op.token}, found {f.text}"
    return _match_formula(pl, f.left, env) or _match_formula(pr, f.right, env)


def _match_structure(pat, s: Structure, env: dict) -> str | None:
    if isinstance(pat, Meta):
        bound = env.get(pat.name)
        if bound is None:
            env[pat.name] = s
            return None
        return None if bound == s else f"{pat.name} is {bound.text} elsewhere but {s.text} here"
    if pat[0] == "sleaf":
        if type(s) is not Leaf:
            return f"expected a formula, found structure {s.text}"
        return _match_formula(pat[1], s.formula, env)
    _, op, pl, pr = pat
    if type(s) is not Node or s.op is not op:
        return f"expected structural connective {op.struct_token}, found {s.text}"
    return _match_structure(pl, s.left, env) or _match_structure(pr, s.right, env)


def _match_sequent(pat, s: Sequent, env: dict) -> str | None:
    return _match_structure(pat[0], s.lhs, env) or _match_structure(pat[1], s.rhs, env)


def apply_forward(rule: RuleLabel, premises: Iterable[Sequent], conclusion: Sequent):
    """True if (premises, conclusion) instantiates ``rule``, else a Mismatch."""
    premises = list(premises)
    prem_pats, concl_pat = SCHEMAS[rule]
    if len(premises) != len(prem_pats):
        return Mismatch("premises", f"{rule.value} takes {len(prem_pats)} premises, got {len(premises)}")
    env: dict = {}
    err = _match_sequent(concl_pat, conclusion, env)
    if err:
        return Mismatch("conclusion", err)
    if rule is R.Ax and type(env["A"]) is not Atom:
        return Mismatch("conclusion", "axiom must be atomic")
    for i, (pat, prem) in enumerate(zip(prem_pats, premises)):
        err = _match_sequent(pat, prem, env)
        if err:
            return Mismatch(f"premise {i}", err)
    return True


# ---------------------------------------------------------------------------
# Backward enumeration
# ---------------------------------------------------------------------------

def _display_steps(goal: Sequent) -> Iterator[tuple[RuleLabel, Sequent]]:
    lhs, rhs = goal.lhs, goal.rhs
    if type(lhs) is Node:
        op = lhs.op
        if op is Op.PROD:
            yield R.ResOver, Sequent(lhs.left, Node(Op.OVER, rhs, lhs.right))
            yield R.ResUnder, Sequent(lhs.right, Node(Op.UNDER, lhs.left, rhs))
        elif op is Op.RDIFF:
            yield R.DResRDiffInv, Sequent(lhs.left, Node(Op.COPROD, rhs, lhs.right))
        else:
            yield R.DResLDiffInv, Sequent(lhs.right, Node(Op.COPROD, lhs.left, rhs))
    if type(rhs) is Node:
        op = rhs.op
        if op is Op.OVER:
            yield R.ResOverInv, Sequent(Node(Op.PROD, lhs, rhs.right), rhs.left)
        elif op is Op.UNDER:
            yield R.ResUnderInv, Sequent(Node(Op.PROD, rhs.left, lhs), rhs.right)
        else:
            yield R.DResRDiff, Sequent(Node(Op.RDIFF, lhs, rhs.right), rhs.left)
            yield R.DResLDiff, Sequent(Node(Op.LDIFF, rhs.left, lhs), rhs.right)


def grishin_steps(goal: Sequent) -> list[tuple[RuleLabel, Sequent]]:
    lhs, rhs = goal.lhs, goal.rhs
    if type(lhs) is not Node or type(rhs) is not Node:
        return []
    lo, ro = lhs.op, rhs.op
    if lo is Op.RDIFF and ro is Op.OVER:      # X o/ Q |- P // Y
        x, q, p, y = lhs.left, lhs.right, rhs.left, rhs.right
        label = R.GrishinRDiffOver
    elif lo is Op.RDIFF and ro is Op.UNDER:   # Y o/ Q |- X o\ P
        y, q, x, p = lhs.left, lhs.right, rhs.left, rhs.right
        label = R.GrishinRDiffUnder
    elif lo is Op.LDIFF and ro is Op.OVER:    # P o\ X |- Q // Y
        p, x, q, y = lhs.left, lhs.right, rhs.left, rhs.right
        label = R.GrishinLDiffOver
    elif lo is Op.LDIFF and ro is Op.UNDER:   # P o\ Y |- X o\ Q
        p, y, x, q = lhs.left, lhs.right, rhs.left, rhs.right
        label = R.GrishinLDiffUnder
    else:
        return []
    return [(label, Sequent(Node(Op.PROD, x, y), Node(Op.COPROD, p, q)))]


def unary_logical_step(goal: Sequent) -> tuple[RuleLabel, Sequent] | None:
    """The one-premise logical rule acting on a displayed formula, if any."""
    lhs, rhs = goal.lhs, goal.rhs
    if type(lhs) is Leaf and type(lhs.formula) is Compound:
        f = lhs.formula
        if f.op is Op.PROD:
            return R.TensorL, Sequent(Node(Op.PROD, inp(f.left), inp(f.right)), rhs)
        if f.op is Op.RDIFF:
            return R.RDiffL, Sequent(Node(Op.RDIFF, inp(f.left), out(f.right)), rhs)
        if f.op is Op.LDIFF:
            return R.LDiffL, Sequent(Node(Op.LDIFF, out(f.left), inp(f.right)), rhs)
    if type(rhs) is Leaf and type(rhs.formula) is Compound:
        f = rhs.formula
        if f.op is Op.COPROD:
            return R.CoprodR, Sequent(lhs, Node(Op.COPROD, out(f.left), out(f.right)))
        if f.op is Op.OVER:
            return R.OverR, Sequent(lhs, Node(Op.OVER, out(f.left), inp(f.right)))
        if f.op is Op.UNDER:
            return R.UnderR, Sequent(lhs, Node(Op.UNDER, inp(f.left), out(f.right)))
    return None


def binary_logical_step(goal: Sequent) -> tuple[RuleLabel, list[Sequent]] | None:
    """The two-premise logical rule whose conclusion is exactly ``goal``, if any."""
    lhs, rhs = goal.lhs, goal.rhs
    if type(lhs) is Node and type(rhs) is Leaf and type(rhs.formula) is Compound:
        f = rhs.formula
        if lhs.op is Op.PROD and f.op is Op.PROD:
            return R.TensorR, [Sequent(lhs.left, out(f.left)), Sequent(lhs.right, out(f.right))]
        if lhs.op is Op.LDIFF and f.op is Op.LDIFF:    # P o\ X |- A (\) B
            return R.LDiffR, [Sequent(lhs.right, out(f.right)), Sequent(inp(f.left), lhs.left)]
        if lhs.op is Op.RDIFF and f.op is Op.RDIFF:    # X o/ P |- B (/) A
            return R.RDiffR, [Sequent(lhs.left, out(f.left)), Sequent(inp(f.right), lhs.right)]
    if type(rhs) is Node and type(lhs) is Leaf and type(lhs.formula) is Compound:
        f = lhs.formula
        if rhs.op is Op.COPROD and f.op is Op.COPROD:  # B (+) A |- P o+ Q
            return R.CoprodL, [Sequent(inp(f.left), rhs.left), Sequent(inp(f.right), rhs.right)]
        if rhs.op is Op.OVER and f.op is Op.OVER:      # B / A |- P o/ X
            return R.OverL, [Sequent(rhs.right, out(f.right)), Sequent(inp(f.left), rhs.left)]
        if rhs.op is Op.UNDER and f.op is Op.UNDER:    # A \ B |- X o\ P
            return R.UnderL, [Sequent(rhs.left, out(f.left)), Sequent(inp(f.right), rhs.right)]
    return None


def is_axiom(goal: Sequent) -> bool:
    lhs, rhs = goal.lhs, goal.rhs
    return (type(lhs) is Leaf and type(rhs) is Leaf and type(lhs.formula) is Atom
            and lhs.formula == rhs.formula)


def backward_steps(goal: Sequent) -> list[tuple[RuleLabel, list[Sequent]]]:
    """Every Cut-free rule instance whose conclusion is ``goal``."""
    steps: list[tuple[RuleLabel, list[Sequent]]] = []
    if is_axiom(goal):
        steps.append((R.Ax, []))
    unary = unary_logical_step(goal)
    if unary:
        steps.append((unary[0], [unary[1]]))
    binary = binary_logical_step(goal)
    if binary:
        steps.append(binary)
    steps.extend((label, [prem]) for label, prem in grishin_steps(goal))
    steps.extend((label, [prem]) for label, prem in _display_steps(goal))
    return steps


# ---------------------------------------------------------------------------
# Display equivalence
# ---------------------------------------------------------------------------

class ClosureCapExceeded(RuntimeError):
    pass


def display_paths(s: Sequent, cap: int | None = None) -> dict[Sequent, tuple]:
    """BFS over display moves from ``s``.

    Maps each member of the display class to the shortest path reaching it,
    given as a tuple of (label, sequent) pairs read from ``s`` upward: the
    first label is the rule whose conclusion is ``s``.
    """
    paths: dict[Sequent, tuple] = {s: ()}
    queue = deque([s])
    while queue:
        cur = queue.popleft()
        base = paths[cur]
        for label, nxt in _display_steps(cur):
            if nxt not in paths:
                paths[nxt] = base + ((label, nxt),)
                if cap is not None and len(paths) > cap:
                    raise ClosureCapExceeded(f"display closure of {s} exceeds {cap}")
                queue.append(nxt)
    return paths


def display_closure(s: Sequent, cap: int | None = None) -> set[Sequent]:
    return set(display_paths(s, cap))


def canonical(s: Sequent) -> Sequent:
    return min(display_paths(s), key=lambda m: m.text)


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Derivation:
    conclusion: Sequent
    rule: RuleLabel
    premises: tuple[Derivation, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.premises, tuple):
            object.__setattr__(self, "premises", tuple(self.premises))

    def nodes(self) -> Iterator[tuple[tuple[int, ...], Derivation]]:
        """Pre-order walk yielding (path, node)."""
        stack: list[tuple[tuple[int, ...], Derivation]] = [((), self)]
        while stack:
            path, d = stack.pop()
            yield path, d
            for i in range(len(d.premises) - 1, -1, -1):
                stack.append((path + (i,), d.premises[i]))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        best = 0
        stack = [(self, 1)]
        while stack:
            d, h = stack.pop()
            best = max(best, h)
            stack.extend((p, h + 1) for p in d.premises)
        return best

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        a, b = list(self.nodes()), list(other.nodes())
        return len(a) == len(b) and all(
            pa == pb and x.rule is y.rule and x.conclusion == y.conclusion
            and len(x.premises) == len(y.premises)
            for (pa, x), (pb, y) in zip(a, b))

    __hash__ = None


def via_display(start: Sequent, path: tuple, d: Derivation) -> Derivation:
    """Derivation of ``start`` from a derivation ``d`` of the path's endpoint."""
    for i in range(len(path) - 1, -1, -1):
        label, _ = path[i]
        concl = path[i - 1][1] if i > 0 else start
        d = Derivation(concl, label, (d,))
    return d


def display_to(start: Sequent, target: Sequent, d: Derivation) -> Derivation:
    """Derive ``start`` from a derivation ``d`` of a display-equivalent ``target``."""
    if d.conclusion != target:
        raise ValueError(f"derivation concludes {d.conclusion}, expected {target}")
    paths = display_paths(start)
    if target not in paths:
        raise ValueError(f"{target} is not display-equivalent to {start}")
    return via_display(start, paths[target], d)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    logical_count: int = 0
    grishin_count: int = 0
    display_count: int = 0
    cut_count: int = 0
    first_error: tuple[tuple[int, ...], str] | None = field(default=None)

    def __post_init__(self) -> None:
        if self.ok and self.first_error is not None:
            raise ValueError("a passing report carries no error")


def check(d: Derivation, allow_cut: bool = False) -> CheckReport:
    counts = {"logical": 0, "grishin": 0, "display": 0, "cut": 0, "axiom": 0}
    error = None
    for path, node in d.nodes():
        counts[node.rule.kind] += 1
        if error is not None:
            continue
        if node.rule is R.Cut and not allow_cut:
            error = (path, "Cut is not allowed")
            continue
        verdict = apply_forward(node.rule, [p.conclusion for p in node.premises], node.conclusion)
        if verdict is not True:
            error = (path, f"{node.rule.value} at {node.conclusion}: {verdict}")
    return CheckReport(ok=error is None, logical_count=counts["logical"],
                       grishin_count=counts["grishin"], display_count=counts["display"],
                       cut_count=counts["cut"], first_error=error)


def formula_total(s: Sequent) -> int:
    return census(s).formula_total
