"""Term model for Lambek-Grishin formulas, polarized structures and sequents.

Concrete syntax (ASCII, every binary application parenthesized except the
outermost one)::

    formula connectives      *   /   \\   (+)   (/)   (\\)
    structural connectives  .*. ./. .\\. .(+). .(/). .(\\).
    turnstile               |-

All values are immutable.  Every node caches its rendered text, which doubles
as the equality/hash key, so values can be used as dictionary keys cheaply.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

__all__ = [
    "Op", "Polarity", "Atom", "Compound", "Formula", "Leaf", "Node", "Structure",
    "Sequent", "ConnectiveCensus", "ParseError", "PolarityError",
    "parse_formula", "parse_structure", "parse_sequent", "render", "census",
    "sequent_length", "polarity_error", "inp", "out", "atom_balance", "family_excess",
]

ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class Op(Enum):
    """The six binary connectives, shared by formulas and structures."""

    PROD = "*"
    OVER = "/"
    UNDER = "\\"
    COPROD = "(+)"
    RDIFF = "(/)"
    LDIFF = "(\\)"

    @property
    def token(self) -> str:
        return self.value

    @property
    def struct_token(self) -> str:
        return "." + self.value + "."

    @property
    def input_family(self) -> bool:
        return self in (Op.PROD, Op.OVER, Op.UNDER)


class Polarity(Enum):
    INPUT = "input"
    OUTPUT = "output"

    def flip(self) -> Polarity:
        return Polarity.OUTPUT if self is Polarity.INPUT else Polarity.INPUT


IN, OUT = Polarity.INPUT, Polarity.OUTPUT

# polarity of a structural node, fixed by its connective
STRUCT_POLARITY = {
    Op.PROD: IN, Op.RDIFF: IN, Op.LDIFF: IN,
    Op.COPROD: OUT, Op.OVER: OUT, Op.UNDER: OUT,
}

# (left, right) polarity demanded of the children of a structural node
CHILD_POLARITY = {
    Op.PROD: (IN, IN),
    Op.RDIFF: (IN, OUT),
    Op.LDIFF: (OUT, IN),
    Op.COPROD: (OUT, OUT),
    Op.OVER: (OUT, IN),
    Op.UNDER: (IN, OUT),
}

# whether each operand of a formula connective keeps (+1) or flips (-1)
# the polarity of the whole formula
_FORMULA_SIGNS = {
    Op.PROD: (1, 1),
    Op.COPROD: (1, 1),
    Op.OVER: (1, -1),
    Op.RDIFF: (1, -1),
    Op.UNDER: (-1, 1),
    Op.LDIFF: (-1, 1),
}


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True, eq=False)
class Atom:
    name: str
    text: str = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not ATOM_RE.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")
        object.__setattr__(self, "text", self.name)

    size = 0
    input_count = 0

    @property
    def signed_atoms(self) -> dict[str, int]:
        return {self.name: 1}

    def family_excess(self, polarity: Polarity) -> tuple[int, int]:
        return (0, 0)

    def __eq__(self, other: object) -> bool:
        return type(other) is Atom and other.text == self.text

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True, slots=True, eq=False)
class Compound:
    op: Op
    left: Formula
    right: Formula
    text: str = field(init=False, repr=False)
    size: int = field(init=False, repr=False)
    input_count: int = field(init=False, repr=False)
    _signed: dict = field(init=False, repr=False)
    _excess: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        setattr_ = object.__setattr__
        setattr_(self, "text", f"{_wrap(self.left)} {self.op.token} {_wrap(self.right)}")
        setattr_(self, "size", self.left.size + self.right.size + 1)
        setattr_(self, "input_count",
                 self.left.input_count + self.right.input_count + self.op.input_family)
        setattr_(self, "_signed", None)
        setattr_(self, "_excess", {})

    @property
    def signed_atoms(self) -> dict[str, int]:
        """Atom occurrences counted +1 in input and -1 in output position,
        assuming the whole formula sits in input position."""
        if self._signed is None:
            sl, sr = _FORMULA_SIGNS[self.op]
            acc: Counter = Counter()
            for name, k in self.left.signed_atoms.items():
                acc[name] += sl * k
            for name, k in self.right.signed_atoms.items():
                acc[name] += sr * k
            object.__setattr__(self, "_signed", dict(acc))
        return self._signed

    def family_excess(self, polarity: Polarity) -> tuple[int, int]:
        """(input family, output family) counts of connectives removed by
        one-premise rules minus those removed by two-premise rules, for this
        formula in the given position."""
        hit = self._excess.get(polarity)
        if hit is None:
            op = self.op
            flip = polarity.flip()
            lp = flip if op in (Op.UNDER, Op.LDIFF) else polarity
            rp = flip if op in (Op.OVER, Op.RDIFF) else polarity
            a, b = self.left.family_excess(lp), self.right.family_excess(rp)
            own = 1 if STRUCT_POLARITY[op] is polarity else -1
            if op.input_family:
                hit = (a[0] + b[0] + own, a[1] + b[1])
            else:
                hit = (a[0] + b[0], a[1] + b[1] + own)
            self._excess[polarity] = hit
        return hit

    def __eq__(self, other: object) -> bool:
        return type(other) is Compound and other.text == self.text

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text


Formula = Union[Atom, Compound]


def _wrap(f: Formula) -> str:
    return f.text if type(f) is Atom else "(" + f.text + ")"


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True, eq=False)
class Leaf:
    formula: Formula
    polarity: Polarity
    text: str = field(init=False, repr=False)
    pols: str = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", self.formula.text)
        object.__setattr__(self, "pols", "i" if self.polarity is IN else "o")

    valid = True
    structural = 0

    @property
    def formula_total(self) -> int:
        return self.formula.size

    @property
    def input_count(self) -> int:
        return self.formula.input_count

    def __eq__(self, other: object) -> bool:
        return type(other) is Leaf and other.text == self.text and other.pols == self.pols

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True, slots=True, eq=False)
class Node:
    op: Op
    left: Structure
    right: Structure
    text: str = field(init=False, repr=False)
    pols: str = field(init=False, repr=False)
    polarity: Polarity = field(init=False, repr=False)
    valid: bool = field(init=False, repr=False)
    structural: int = field(init=False, repr=False)
    formula_total: int = field(init=False, repr=False)
    input_count: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        setattr_ = object.__setattr__
        l, r = self.left, self.right
        polarity, pl, pr, token = _NODE_TABLE[self.op]
        setattr_(self, "text", f"{_swrap(l)} {token} {_swrap(r)}")
        setattr_(self, "pols", l.pols + r.pols)
        setattr_(self, "polarity", polarity)
        setattr_(self, "valid", l.valid and r.valid and l.polarity is pl and r.polarity is pr)
        setattr_(self, "structural", l.structural + r.structural + 1)
        setattr_(self, "formula_total", l.formula_total + r.formula_total)
        setattr_(self, "input_count", l.input_count + r.input_count)

    def __eq__(self, other: object) -> bool:
        return type(other) is Node and other.text == self.text and other.pols == self.pols

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text


Structure = Union[Leaf, Node]


_NODE_TABLE = {op: (STRUCT_POLARITY[op], *CHILD_POLARITY[op], op.struct_token) for op in Op}


def _swrap(s: Structure) -> str:
    if type(s) is Leaf and type(s.formula) is Atom:
        return s.text
    return "(" + s.text + ")"


def inp(f: Formula) -> Leaf:
    return Leaf(f, IN)


def out(f: Formula) -> Leaf:
    return Leaf(f, OUT)


def polarity_error(s: Structure, expected: Polarity) -> tuple[tuple[int, ...], str] | None:
    """First violation of the input/output structure grammar, as (path, message).

    The path lists child indices (0 = left, 1 = right) from the root.
    """
    stack: list[tuple[Structure, Polarity, tuple[int, ...]]] = [(s, expected, ())]
    while stack:
        node, want, path = stack.pop()
        if type(node) is Leaf:
            if node.polarity is not want:
                return path, f"leaf {node.text} marked {node.polarity.value} in {want.value} position"
            continue
        if node.polarity is not want:
            return path, (f"{node.polarity.value} connective {node.op.struct_token} "
                          f"in {want.value} position")
        pl, pr = CHILD_POLARITY[node.op]
        stack.append((node.right, pr, path + (1,)))
        stack.append((node.left, pl, path + (0,)))
    return None


# ---------------------------------------------------------------------------
# Sequents
# ---------------------------------------------------------------------------

class PolarityError(ValueError):
    def __init__(self, side: str, path: tuple[int, ...], message: str):
        self.side = side
        self.path = path
        super().__init__(f"{side} side, path {list(path)}: {message}")


@dataclass(frozen=True, slots=True, eq=False)
class Sequent:
    lhs: Structure
    rhs: Structure
    text: str = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.lhs.valid and self.lhs.polarity is IN):
            path, msg = polarity_error(self.lhs, IN)
            raise PolarityError("left", path, msg)
        if not (self.rhs.valid and self.rhs.polarity is OUT):
            path, msg = polarity_error(self.rhs, OUT)
            raise PolarityError("right", path, msg)
        object.__setattr__(self, "text", f"{self.lhs.text} |- {self.rhs.text}")

    def __eq__(self, other: object) -> bool:
        return (type(other) is Sequent and other.text == self.text
                and other.lhs.pols == self.lhs.pols)

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"Sequent({self.text!r})"


def render(x: Formula | Structure | Sequent) -> str:
    return x.text


@dataclass(frozen=True)
class ConnectiveCensus:
    formula_total: int
    structural_total: int
    input_family: int
    output_family: int

    @property
    def length(self) -> int:
        return self.formula_total + self.structural_total


def census(x: Sequent | Structure | Formula) -> ConnectiveCensus:
    if isinstance(x, Sequent):
        a, b = census(x.lhs), census(x.rhs)
        return ConnectiveCensus(a.formula_total + b.formula_total,
                                a.structural_total + b.structural_total,
                                a.input_family + b.input_family,
                                a.output_family + b.output_family)
    if isinstance(x, (Atom, Compound)):
        return ConnectiveCensus(x.size, 0, x.input_count, x.size - x.input_count)
    return ConnectiveCensus(x.formula_total, x.structural, x.input_count,
                            x.formula_total - x.input_count)


def sequent_length(s: Sequent) -> int:
    return census(s).length


def leaves(s: Structure) -> Iterator[Leaf]:
    stack = [s]
    while stack:
        node = stack.pop()
        if type(node) is Leaf:
            yield node
        else:
            stack.append(node.right)
            stack.append(node.left)


def atom_balance(s: Sequent) -> dict[str, int]:
    """Input minus output occurrences per atom; all zero for derivable sequents."""
    acc: Counter = Counter()
    for side in (s.lhs, s.rhs):
        for leaf in leaves(side):
            sign = 1 if leaf.polarity is IN else -1
            for name, k in leaf.formula.signed_atoms.items():
                acc[name] += sign * k
    return {k: v for k, v in acc.items() if v}


def family_excess(s: Sequent) -> tuple[int, int]:
    """Per connective family: structural connectives plus formula connectives
    in one-premise position, minus formula connectives in two-premise position.

    Display and Grishin steps preserve both numbers and each logical rule
    preserves them (summed over premises), so a derivable sequent has (0, 0).
    """
    fin = fout = 0
    stack = [s.lhs, s.rhs]
    while stack:
        x = stack.pop()
        if type(x) is Leaf:
            a, b = x.formula.family_excess(x.polarity)
            fin += a
            fout += b
        else:
            if x.op.input_family:
                fin += 1
            else:
                fout += 1
            stack.append(x.left)
            stack.append(x.right)
    return fin, fout


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte {offset}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<sop>\.\(\+\)\.|\.\(/\)\.|\.\(\\\)\.|\.\*\.|\./\.|\.\\\.)
  | (?P<fop>\(\+\)|\(/\)|\(\\\)|\*|/|\\)
  | (?P<turnstile>\|-)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
""", re.VERBOSE)

_FOPS = {op.token: op for op in Op}
_SOPS = {op.struct_token: op for op in Op}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    toks.append(("end", "", _byte_offset(text, len(text))))
    return toks


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


# raw parse tree: ("id", name, offset) | ("bin", kind, op, left, right, offset)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expr(self):
        left = self.operand()
        kind, val, off = self.peek()
        if kind not in ("fop", "sop"):
            return left
        self.take()
        right = self.operand()
        nk, _, noff = self.peek()
        if nk in ("fop", "sop"):
            raise ParseError("missing parentheses: connectives do not associate", noff)
        op = _FOPS[val] if kind == "fop" else _SOPS[val]
        return ("bin", kind, op, left, right, off)

    def operand(self):
        kind, val, off = self.take()
        if kind == "ident":
            return ("id", val, off)
        if kind == "lpar":
            inner = self.expr()
            k, _, o = self.take()
            if k != "rpar":
                raise ParseError("expected ')'", o)
            return inner
        raise ParseError(f"expected atom or '(' but found {val or 'end of input'!r}", off)

    def finish(self) -> None:
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", off)


def _ident(name: str, off: int, meta: bool):
    if ATOM_RE.match(name):
        return Atom(name)
    if meta:
        return Meta(name)
    raise ParseError(f"invalid atom name {name!r}", off)


@dataclass(frozen=True, slots=True)
class Meta:
    """Metavariable; appears only in rule schemas."""

    name: str


def _to_formula(tree, meta: bool = False):
    if tree[0] == "id":
        return _ident(tree[1], tree[2], meta)
    _, kind, op, l, r, off = tree
    if kind == "sop":
        raise ParseError(f"structural connective {op.struct_token} inside a formula", off)
    left, right = _to_formula(l, meta), _to_formula(r, meta)
    if meta and not (isinstance(left, (Atom, Compound)) and isinstance(right, (Atom, Compound))):
        return ("fpat", op, left, right)
    return Compound(op, left, right)


def _to_structure(tree, want: Polarity, path: tuple[int, ...], side: str):
    if tree[0] == "id" or tree[1] == "fop":
        return Leaf(_to_formula(tree), want)
    _, _, op, l, r, off = tree
    if STRUCT_POLARITY[op] is not want:
        raise PolarityError(side, path, f"{STRUCT_POLARITY[op].value} connective "
                                        f"{op.struct_token} in {want.value} position (byte {off})")
    pl, pr = CHILD_POLARITY[op]
    return Node(op, _to_structure(l, pl, path + (0,), side), _to_structure(r, pr, path + (1,), side))


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    tree = p.expr()
    p.finish()
    return _to_formula(tree)


def parse_structure(text: str, polarity: Polarity) -> Structure:
    p = _Parser(text)
    tree = p.expr()
    p.finish()
    return _to_structure(tree, polarity, (), "left" if polarity is IN else "right")


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    lhs = p.expr()
    kind, val, off = p.take()
    if kind != "turnstile":
        raise ParseError(f"expected '|-' but found {val or 'end of input'!r}", off)
    rhs = p.expr()
    p.finish()
    return Sequent(_to_structure(lhs, IN, (), "left"), _to_structure(rhs, OUT, (), "right"))


def parse_schema(text: str):
    """Parse a rule schema: uppercase identifiers become metavariables.

    Returns raw pattern trees consumed by :mod:`lgrishin.calculus`.
    """
    p = _Parser(text)
    lhs = p.expr()
    kind, _, off = p.take()
    if kind != "turnstile":
        raise ParseError("expected '|-'", off)
    rhs = p.expr()
    p.finish()
    return _to_pattern(lhs), _to_pattern(rhs)


def _to_pattern(tree):
    # structure level: ("snode", op, l, r) | ("sleaf", fpattern) | Meta (structure var)
    if tree[0] == "id":
        x = _ident(tree[1], tree[2], True)
        if isinstance(x, Meta) and x.name[0] in "XYPQ":
            return x
        return ("sleaf", x)
    _, kind, op, l, r, _ = tree
    if kind == "fop":
        return ("sleaf", _to_formula(tree, meta=True))
    return ("snode", op, _to_pattern(l), _to_pattern(r))
