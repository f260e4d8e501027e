"""Brute-force SAT, explicit derivations from satisfying assignments, round trips.

``build_witness`` turns a satisfying assignment into a derivation of the
reduced sequent.  It works top-down on the goal, one stage at a time:

* unfold the product of meet types into a structural product;
* replace each meet type ``F_j`` by ``E_j(t_j)`` (a Cut against the meet
  lemma), and unfold each ``E_j(t_j)`` in turn;
* for clause ``i = n .. 1``: move the ``(/) (p_i (\\) p_i)`` of the leftmost
  clause-i marker out of the product, close it against ``G_i`` with the
  right difference rule, and rewrite the other clause-i markers to ``p_i``;
* finish the remaining product of atoms against ``G_0`` with ``TensorR``.

Each stage records how to wrap a derivation of its successor goal into a
derivation of its own goal; the wraps are applied from the last stage back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .calculus import Derivation, RuleLabel, check, display_to
from .core import Atom, Compound, Leaf, Node, Op, Sequent, Structure, inp, out
from .prover import BudgetExceeded, Budgets, ProveOutcome, Proved, prove
from .reduction import CnfFormula, E_formula, H, clause_atom, marked, reduce

__all__ = [
    "brute_force_sat", "build_witness", "roundtrip", "RoundtripVerdict",
    "identity", "meet_lemma", "join_lemma", "marker_lemma", "WitnessError",
    "MAX_BRUTE_FORCE_VARS",
]

R = RuleLabel
MAX_BRUTE_FORCE_VARS = 24


def brute_force_sat(cnf: CnfFormula) -> tuple[int, ...] | None:
    """First satisfying assignment in lexicographic order (0 < 1), or None."""
    if cnf.num_vars > MAX_BRUTE_FORCE_VARS:
        raise ValueError(f"{cnf.num_vars} variables exceed the enumeration guard "
                         f"of {MAX_BRUTE_FORCE_VARS}")
    for values in itertools.product((0, 1), repeat=cnf.num_vars):
        if cnf.satisfied_by(values):
            return values
    return None


class WitnessError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Small derivations
# ---------------------------------------------------------------------------

def identity(f) -> Derivation:
    """Cut-free derivation of ``f |- f``."""
    goal = Sequent(inp(f), out(f))
    if type(f) is Atom:
        return Derivation(goal, R.Ax)
    a, b, op = f.left, f.right, f.op
    if op is Op.PROD:
        mid = Sequent(Node(Op.PROD, inp(a), inp(b)), out(f))
        return Derivation(goal, R.TensorL, (Derivation(mid, R.TensorR, (identity(a), identity(b))),))
    if op is Op.COPROD:
        mid = Sequent(inp(f), Node(Op.COPROD, out(a), out(b)))
        return Derivation(goal, R.CoprodR, (Derivation(mid, R.CoprodL, (identity(a), identity(b))),))
    if op is Op.OVER:
        mid = Sequent(inp(f), Node(Op.OVER, out(a), inp(b)))
        return Derivation(goal, R.OverR, (Derivation(mid, R.OverL, (identity(b), identity(a))),))
    if op is Op.UNDER:
        mid = Sequent(inp(f), Node(Op.UNDER, inp(a), out(b)))
        return Derivation(goal, R.UnderR, (Derivation(mid, R.UnderL, (identity(a), identity(b))),))
    if op is Op.RDIFF:
        mid = Sequent(Node(Op.RDIFF, inp(a), out(b)), out(f))
        return Derivation(goal, R.RDiffL, (Derivation(mid, R.RDiffR, (identity(a), identity(b))),))
    mid = Sequent(Node(Op.LDIFF, out(a), inp(b)), out(f))
    return Derivation(goal, R.LDiffL, (Derivation(mid, R.LDiffR, (identity(b), identity(a))),))


def marker_lemma(i: int) -> Derivation:
    """``p_i (/) (p_i (\\) p_i) |- p_i``."""
    p = clause_atom(i)
    pp = Compound(Op.LDIFF, p, p)
    ax = Derivation(Sequent(inp(p), out(p)), R.Ax)
    top = Derivation(Sequent(Node(Op.LDIFF, out(p), inp(p)), out(pp)), R.LDiffR, (ax, ax))
    opened = Sequent(Node(Op.RDIFF, inp(p), out(pp)), out(p))
    return Derivation(Sequent(inp(marked(i)), out(p)), R.RDiffL, (display_to(opened, top.conclusion, top),))


def _close_product(goal: Sequent) -> Derivation:
    """Match a structural product against a formula product, factor by factor.

    Leaves must be the atom itself or its clause marker.
    """
    lhs, rhs = goal.lhs, goal.rhs
    f = rhs.formula
    if type(lhs) is Node:
        if lhs.op is not Op.PROD or type(f) is not Compound or f.op is not Op.PROD:
            raise WitnessError(f"cannot close {goal}")
        return Derivation(goal, R.TensorR, (_close_product(Sequent(lhs.left, out(f.left))),
                                            _close_product(Sequent(lhs.right, out(f.right)))))
    if lhs.formula == f and type(f) is Atom:
        return Derivation(goal, R.Ax)
    if type(f) is Atom and f.name.startswith("p") and lhs.formula == marked(int(f.name[1:])):
        return marker_lemma(int(f.name[1:]))
    raise WitnessError(f"cannot close {goal}")


def join_lemma(e, h) -> Derivation:
    """``E_j(t) |- H_j``: unfold the product, then match factor by factor."""
    stages = _Stages(Sequent(inp(e), out(h)))
    stages.unfold_chain((), _chain_length(e) - 1)
    return stages.finish(_close_product(stages.goal))


def meet_lemma(a, b, c, choose_left: bool, side: Derivation, join_a: Derivation,
               join_b: Derivation) -> Derivation:
    """Derivation of ``meet(a, b, c) |- P`` from ``side``.

    ``side`` proves ``a |- P`` when ``choose_left`` and ``b |- P`` otherwise;
    ``join_a`` and ``join_b`` prove ``a |- c`` and ``b |- c``.
    """
    cc = Compound(Op.OVER, c, c)
    k = Compound(Op.UNDER, cc, c)
    left_part = Compound(Op.OVER, a, k)
    right_part = Compound(Op.UNDER, cc, b)
    p = side.conclusion.rhs
    goal = Sequent(inp(Compound(Op.PROD, left_part, right_part)), p)
    opened = Sequent(Node(Op.PROD, inp(left_part), inp(right_part)), p)
    id_c = identity(c)
    if choose_left:
        # M\B |- (C/C)\C, then the left factor consumes it
        inner = Sequent(inp(right_part), Node(Op.UNDER, inp(cc), out(c)))
        under_l = Derivation(inner, R.UnderL, (identity(cc), join_b))
        to_k = Derivation(Sequent(inp(right_part), out(k)), R.UnderR, (under_l,))
        shown = Sequent(inp(left_part), Node(Op.OVER, p, inp(right_part)))
        core = Derivation(shown, R.OverL, (to_k, side))
    else:
        # C |- (C/C)\C via residuation, so A/((C/C)\C) |- C/C
        c_to_k_inner = Sequent(inp(c), Node(Op.UNDER, inp(cc), out(c)))
        cc_over = Sequent(inp(cc), Node(Op.OVER, out(c), inp(c)))
        cc_proof = Derivation(cc_over, R.OverL, (id_c, id_c))
        c_to_k = Derivation(Sequent(inp(c), out(k)), R.UnderR,
                            (display_to(c_to_k_inner, cc_over, cc_proof),))
        lp_over = Sequent(inp(left_part), Node(Op.OVER, out(c), inp(c)))
        lp_to_cc = Derivation(Sequent(inp(left_part), out(cc)), R.OverR,
                              (Derivation(lp_over, R.OverL, (c_to_k, join_a)),))
        shown = Sequent(inp(right_part), Node(Op.UNDER, inp(left_part), p))
        core = Derivation(shown, R.UnderL, (lp_to_cc, side))
    return Derivation(goal, R.TensorL, (display_to(opened, shown, core),))


# ---------------------------------------------------------------------------
# Goal-directed stages over product structures
# ---------------------------------------------------------------------------

def _get(s: Structure, path: tuple[int, ...]) -> Structure:
    for step in path:
        s = s.right if step else s.left
    return s


def _replace(s: Structure, path: tuple[int, ...], new: Structure) -> Structure:
    if not path:
        return new
    if path[0] == 0:
        return Node(s.op, _replace(s.left, path[1:], new), s.right)
    return Node(s.op, s.left, _replace(s.right, path[1:], new))


def _isolate(lhs: Structure, rhs: Structure, path: tuple[int, ...]) -> Sequent:
    """Display the substructure at ``path`` of a product structure alone on the left."""
    for step in path:
        if lhs.op is not Op.PROD:
            raise WitnessError(f"{lhs} is not a product structure")
        if step == 0:
            lhs, rhs = lhs.left, Node(Op.OVER, rhs, lhs.right)
        else:
            lhs, rhs = lhs.right, Node(Op.UNDER, lhs.left, rhs)
    return Sequent(lhs, rhs)


def _leaf_paths(s: Structure, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Leaf]]:
    """Leaves of a product structure in left-to-right order."""
    if type(s) is Leaf:
        yield prefix, s
    else:
        yield from _leaf_paths(s.left, prefix + (0,))
        yield from _leaf_paths(s.right, prefix + (1,))


def _chain_length(f) -> int:
    n = 1
    while type(f) is Compound and f.op is Op.PROD:
        f, n = f.right, n + 1
    return n


@dataclass
class _Stages:
    goal: Sequent
    wraps: list[Callable[[Derivation], Derivation]] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)

    def _push(self, new_goal: Sequent, wrap, name: str) -> None:
        self.wraps.append(wrap)
        self.trace.append(name)
        self.goal = new_goal

    def unfold(self, path: tuple[int, ...]) -> None:
        goal = self.goal
        leaf = _get(goal.lhs, path)
        f = leaf.formula
        if type(f) is not Compound or f.op is not Op.PROD:
            raise WitnessError(f"leaf {leaf} is not a product")
        iso = _isolate(goal.lhs, goal.rhs, path)
        nxt = Sequent(_replace(goal.lhs, path, Node(Op.PROD, inp(f.left), inp(f.right))), goal.rhs)
        iso_next = _isolate(nxt.lhs, nxt.rhs, path)

        def wrap(d: Derivation) -> Derivation:
            opened = Derivation(iso, R.TensorL, (display_to(iso_next, nxt, d),))
            return display_to(goal, iso, opened)

        self._push(nxt, wrap, "TensorL")

    def unfold_chain(self, path: tuple[int, ...], count: int) -> None:
        for _ in range(count):
            self.unfold(path)
            path = path + (1,)

    def replace(self, path: tuple[int, ...], lemma: Derivation) -> None:
        """Replace leaf A by B given ``lemma`` proving A |- B (a Cut)."""
        goal = self.goal
        a_leaf = _get(goal.lhs, path)
        if lemma.conclusion.lhs != a_leaf:
            raise WitnessError(f"lemma {lemma.conclusion} does not apply to {a_leaf}")
        b = lemma.conclusion.rhs.formula
        iso = _isolate(goal.lhs, goal.rhs, path)
        nxt = Sequent(_replace(goal.lhs, path, inp(b)), goal.rhs)
        iso_next = _isolate(nxt.lhs, nxt.rhs, path)

        def wrap(d: Derivation) -> Derivation:
            cut = Derivation(iso, R.Cut, (lemma, display_to(iso_next, nxt, d)))
            return display_to(goal, iso, cut)

        self._push(nxt, wrap, "Repl")

    def move(self, path: tuple[int, ...]) -> None:
        """Pull the ``(/) B`` of the leaf ``A (/) B`` at ``path`` out of the product."""
        goal = self.goal
        f = _get(goal.lhs, path).formula
        if type(f) is not Compound or f.op is not Op.RDIFF:
            raise WitnessError(f"{f} is not a right difference")
        b = out(f.right)
        nxt = Sequent(Node(Op.RDIFF, _replace(goal.lhs, path, inp(f.left)), b), goal.rhs)

        def wrap(d: Derivation) -> Derivation:
            return _move(goal.lhs, path, goal.rhs, inp(f.left), b, d)

        self._push(nxt, wrap, "Move")

    def rdiff_right(self) -> None:
        goal = self.goal
        lhs, g = goal.lhs, goal.rhs.formula
        if type(lhs) is not Node or lhs.op is not Op.RDIFF or type(g) is not Compound \
                or g.op is not Op.RDIFF or lhs.right.formula != g.right:
            raise WitnessError(f"right difference rule does not apply to {goal}")
        nxt = Sequent(lhs.left, out(g.left))
        closing = identity(g.right)

        def wrap(d: Derivation) -> Derivation:
            return Derivation(goal, R.RDiffR, (d, closing))

        self._push(nxt, wrap, "RDiffR")

    def finish(self, top: Derivation) -> Derivation:
        d = top
        for wrap in reversed(self.wraps):
            d = wrap(d)
        return d


def _move(u: Structure, path: tuple[int, ...], p: Structure, a: Leaf, b: Leaf,
          cont: Derivation) -> Derivation:
    """Derive ``u |- p`` from ``cont`` proving ``u[a] o/ b |- p``."""
    goal = Sequent(u, p)
    if not path:
        return Derivation(goal, R.RDiffL, (cont,))
    left, right = u.left, u.right
    if path[0] == 0:
        la = _replace(left, path[1:], a)
        ctx = Node(Op.OVER, p, right)
        g_concl = Sequent(Node(Op.RDIFF, la, b), ctx)
        g_prem = Sequent(Node(Op.PROD, la, right), Node(Op.COPROD, p, b))
        label, sub_u, sub_path = R.GrishinRDiffOver, left, path[1:]
    else:
        ra = _replace(right, path[1:], a)
        ctx = Node(Op.UNDER, left, p)
        g_concl = Sequent(Node(Op.RDIFF, ra, b), ctx)
        g_prem = Sequent(Node(Op.PROD, left, ra), Node(Op.COPROD, p, b))
        label, sub_u, sub_path = R.GrishinRDiffUnder, right, path[1:]
    grishin = Derivation(g_concl, label, (display_to(g_prem, cont.conclusion, cont),))
    inner = _move(sub_u, sub_path, ctx, a, b, grishin)
    return display_to(goal, inner.conclusion, inner)


# ---------------------------------------------------------------------------
# The witness
# ---------------------------------------------------------------------------

def build_witness(cnf: CnfFormula, assignment, *, trace: list[str] | None = None) -> Derivation:
    """Derivation (with Cuts) of ``reduce(cnf)`` from a satisfying assignment.

    If ``trace`` is given, the names of the derived steps applied along the
    main branch are appended to it, top-down.
    """
    values = tuple(assignment)
    if len(values) != cnf.num_vars or any(v not in (0, 1) for v in values):
        raise WitnessError(f"assignment must be {cnf.num_vars} values in {{0, 1}}")
    if not cnf.satisfied_by(values):
        raise WitnessError("assignment does not satisfy the formula")
    m, n = cnf.num_vars, cnf.num_clauses

    stages = _Stages(reduce(cnf))
    stages.unfold_chain((), m - 1)

    def var_path(j: int) -> tuple[int, ...]:
        return (1,) * (j - 1) + ((0,) if j < m else ())

    for j in range(1, m + 1):
        e1, e0, h = E_formula(j, 1, cnf), E_formula(j, 0, cnf), H(j, cnf)
        chosen = e1 if values[j - 1] else e0
        lemma = meet_lemma(e1, e0, h, bool(values[j - 1]), identity(chosen),
                           join_lemma(e1, h), join_lemma(e0, h))
        stages.replace(var_path(j), lemma)
    for j in range(1, m + 1):
        stages.unfold_chain(var_path(j), n - 1)

    for i in range(n, 0, -1):
        marker = marked(i)
        hits = [path for path, leaf in _leaf_paths(stages.goal.lhs) if leaf.formula == marker]
        if not hits:
            raise WitnessError(f"clause {i} has no marker; the assignment cannot satisfy it")
        stages.move(hits[0])
        stages.rdiff_right()
        for path in hits[1:]:
            stages.replace(path, marker_lemma(i))

    top = _close_product(stages.goal)
    stages.trace.append("TensorR")
    if trace is not None:
        trace.extend(stages.trace)
    return stages.finish(top)


@dataclass(frozen=True)
class RoundtripVerdict:
    sat_result: tuple[int, ...] | None
    lg_result: ProveOutcome
    witness_ok: bool | None = None

    @property
    def inconclusive(self) -> bool:
        return isinstance(self.lg_result, BudgetExceeded)

    @property
    def consistent(self) -> bool:
        """Satisfiable iff Proved; never true for an inconclusive search."""
        if self.inconclusive:
            return False
        agree = (self.sat_result is not None) == isinstance(self.lg_result, Proved)
        return agree and self.witness_ok is not False

    @property
    def summary(self) -> str:
        if self.inconclusive:
            return f"inconclusive: {self.lg_result.which} budget exceeded"
        if not self.consistent:
            return "INCONSISTENT"
        return "consistent: both positive" if self.sat_result is not None \
            else "consistent: both negative"


def roundtrip(cnf: CnfFormula, budgets: Budgets | None = None) -> RoundtripVerdict:
    sat = brute_force_sat(cnf)
    goal = reduce(cnf)
    outcome = prove(goal, budgets)
    witness_ok = None
    if sat is not None:
        d = build_witness(cnf, sat)
        witness_ok = d.conclusion == goal and check(d, allow_cut=True).ok
    return RoundtripVerdict(sat, outcome, witness_ok)

