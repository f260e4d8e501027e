"""Derivation trees as JSON, LaTeX (bussproofs) and indented text."""

from __future__ import annotations

import json

from .calculus import RULE_TEX, Derivation, RuleLabel
from .core import Atom, Leaf, Node, Op, ParseError, PolarityError, Sequent, parse_sequent

__all__ = ["to_json", "from_json", "dumps", "loads", "to_latex", "to_text", "DerivationFormatError"]


class DerivationFormatError(ValueError):
    def __init__(self, path: tuple[int, ...], message: str):
        self.path = path
        super().__init__(f"node {list(path)}: {message}")


def to_json(d: Derivation) -> dict:
    root: dict = {}
    stack = [(d, root)]
    while stack:
        node, obj = stack.pop()
        obj["rule"] = node.rule.name
        obj["conclusion"] = node.conclusion.text
        obj["premises"] = [{} for _ in node.premises]
        stack.extend(zip(node.premises, obj["premises"]))
    return root


def from_json(obj) -> Derivation:
    """Inverse of ``to_json``; malformed input raises ``DerivationFormatError``."""
    # post-order: build premises before their conclusion
    order: list[tuple[tuple[int, ...], dict]] = []
    stack = [((), obj)]
    while stack:
        path, node = stack.pop()
        if not isinstance(node, dict):
            raise DerivationFormatError(path, "expected an object")
        missing = {"rule", "conclusion", "premises"} - node.keys()
        if missing:
            raise DerivationFormatError(path, f"missing field(s) {sorted(missing)}")
        if not isinstance(node["premises"], list):
            raise DerivationFormatError(path, "premises must be a list")
        order.append((path, node))
        stack.extend((path + (i,), p) for i, p in enumerate(node["premises"]))
    built: dict[tuple[int, ...], Derivation] = {}
    for path, node in reversed(order):
        try:
            rule = RuleLabel[node["rule"]]
        except (KeyError, TypeError):
            raise DerivationFormatError(path, f"unknown rule {node['rule']!r}") from None
        if not isinstance(node["conclusion"], str):
            raise DerivationFormatError(path, "conclusion must be a string")
        try:
            concl = parse_sequent(node["conclusion"])
        except (ParseError, PolarityError) as exc:
            raise DerivationFormatError(path, f"bad conclusion: {exc}") from None
        prem = tuple(built.pop(path + (i,)) for i in range(len(node["premises"])))
        built[path] = Derivation(concl, rule, prem)
    return built[()]


def dumps(d: Derivation, indent: int | None = None) -> str:
    return json.dumps(to_json(d), indent=indent, ensure_ascii=False)


def loads(text: str) -> Derivation:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DerivationFormatError((), f"invalid JSON: {exc}") from None
    return from_json(obj)


_LATEX_OP = {
    Op.PROD: r"\otimes", Op.OVER: "/", Op.UNDER: r"\backslash",
    Op.COPROD: r"\oplus", Op.RDIFF: r"\oslash", Op.LDIFF: r"\obslash",
}


def _latex_term(x) -> str:
    if type(x) is Atom:
        return x.name
    if type(x) is Leaf:
        return _latex_term(x.formula)
    op = _LATEX_OP[x.op]
    if type(x) is Node:
        op = r"\cdot" + op + r"\cdot"
    parts = []
    for child in (x.left, x.right):
        text = _latex_term(child)
        atomic = type(child) is Atom or (type(child) is Leaf and type(child.formula) is Atom)
        parts.append(text if atomic else f"({text})")
    return f"{parts[0]} {op} {parts[1]}"


def latex_sequent(s: Sequent) -> str:
    return f"{_latex_term(s.lhs)} \\vdash {_latex_term(s.rhs)}"


def to_latex(d: Derivation) -> str:
    """A ``bussproofs`` proof tree annotated with the customary rule names."""
    lines = [r"\begin{prooftree}"]
    # explicit post-order so deep derivations do not hit the recursion limit
    stack: list[tuple[Derivation, bool]] = [(d, False)]
    while stack:
        node, done = stack.pop()
        if not done:
            stack.append((node, True))
            stack.extend((p, False) for p in reversed(node.premises))
            continue
        n = len(node.premises)
        if n == 0:
            lines.append(r"\AxiomC{}")
        lines.append(f"\\RightLabel{{${RULE_TEX[node.rule]}$}}")
        macro = ("UnaryInfC", "UnaryInfC", "BinaryInfC")[n]
        lines.append(f"\\{macro}{{${latex_sequent(node.conclusion)}$}}")
    lines.append(r"\end{prooftree}")
    return "\n".join(lines) + "\n"


def to_text(d: Derivation) -> str:
    """One line per node, premises indented under their conclusion."""
    lines = []
    stack = [(d, 0)]
    while stack:
        node, depth = stack.pop()
        lines.append(f"{'  ' * depth}{node.conclusion.text}    [{node.rule.name}]")
        stack.extend((p, depth + 1) for p in reversed(node.premises))
    return "\n".join(lines) + "\n"
