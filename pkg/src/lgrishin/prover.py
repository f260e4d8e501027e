"""Bounded backward Cut-free proof search.

The search works on display classes: every sequent is replaced by the
lexicographically least member of its display closure, and the memo table is
keyed by that representative.  Within a class, the moves are tried in a fixed
order:

1. ``Ax``;
2. a one-premise logical rule on any member (these rules are invertible, so
   the first applicable one is committed to without backtracking);
3. every two-premise logical rule on any member, premises left to right;
4. every Grishin interaction on any member.

Each proof found for a class is built for its representative and prefixed
with the display moves that lead there, so the returned derivation depends
only on the goal, never on the order in which the memo table was filled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .calculus import (
    INVERSE, Derivation, RuleLabel, binary_logical_step, check, display_paths,
    grishin_steps, is_axiom, unary_logical_step, via_display,
)
from .core import ConnectiveCensus, Sequent, atom_balance, census, family_excess

__all__ = [
    "Budgets", "Proved", "Unprovable", "BudgetExceeded", "ProveOutcome",
    "prove", "stats", "Stats", "default_budgets",
]


@dataclass(frozen=True)
class Budgets:
    grishin_max: int
    depth_max: int
    node_max: int = 2_000_000

    @classmethod
    def for_goal(cls, goal: Sequent, node_max: int = 2_000_000) -> Budgets:
        n = census(goal).length
        return cls(grishin_max=math.ceil(n * n / 4),
                   depth_max=2 * n * n + math.ceil(n ** 3 / 2),
                   node_max=node_max)


default_budgets = Budgets.for_goal


@dataclass(frozen=True)
class Proved:
    derivation: Derivation


@dataclass(frozen=True)
class Unprovable:
    pass


@dataclass(frozen=True)
class BudgetExceeded:
    which: str


ProveOutcome = Proved | Unprovable | BudgetExceeded


class _NodeBudgetTripped(Exception):
    pass


_FAIL = (None, 0, 0, False)


class _Search:
    def __init__(self, budgets: Budgets, memo: bool):
        self.budgets = budgets
        self.memo = memo
        self.proved: dict[str, tuple[Derivation, int, int]] = {}
        # None marks a budget-independent failure; otherwise the (grishin,
        # depth) budgets under which the class failed.
        self.failed: dict[str, tuple[int, int] | None] = {}
        self.explored = 0
        self.tripped: set[str] = set()
        # member -> (representative, shortest display paths from it)
        self.classes: dict[Sequent, tuple[Sequent, dict]] = {}

    def _class_of(self, goal: Sequent) -> tuple[Sequent, dict]:
        entry = self.classes.get(goal)
        if entry is None:
            from_goal = display_paths(goal)
            rep = min(from_goal, key=_text)
            # display classes are trees, so cancelling backtracks in a path
            # through the goal leaves the unique shortest path from rep
            back = _invert(from_goal[rep], goal)
            entry = (rep, {m: _cancel(rep, back + path) for m, path in from_goal.items()})
            for member in entry[1]:
                self.classes[member] = entry
        return entry

    def solve(self, goal: Sequent, grishin: int, depth: int):
        """Returns (derivation | None, grishin used, steps, budget-limited).

        ``steps`` counts the non-axiom rule nodes on the longest branch.
        """
        rep, members = self._class_of(goal)
        lead = _invert(members[goal], rep)
        depth_rep = depth - len(lead)
        found = self._solve_class(rep, grishin, depth_rep)
        if found[0] is None:
            return found
        d, used, height, _ = found
        return via_display(goal, lead, d), used, height + len(lead), False

    def _solve_class(self, rep: Sequent, grishin: int, depth: int):
        key = rep.text
        if self.memo:
            hit = self.proved.get(key)
            if hit is not None:
                d, used, height = hit
                if used <= grishin and height <= depth:
                    return d, used, height, False
                self._trip("grishin" if used > grishin else "depth")
                return None, 0, 0, True
            if key in self.failed:
                bound = self.failed[key]
                if bound is None:
                    return _FAIL
                if grishin <= bound[0] and depth <= bound[1]:
                    return None, 0, 0, True
        if depth < 0:
            self._trip("depth")
            return None, 0, 0, True
        self.explored += 1
        if self.explored > self.budgets.node_max:
            raise _NodeBudgetTripped

        result = self._expand(rep, grishin, depth)
        if self.memo:
            d, used, height, limited = result
            if d is not None:
                self.proved[key] = (d, used, height)
            else:
                self.failed[key] = (grishin, depth) if limited else None
        return result

    def _trip(self, which: str) -> None:
        self.tripped.add(which)

    def _expand(self, rep: Sequent, grishin: int, depth: int):
        members = self._class_of(rep)[1]
        limited = False

        if is_axiom(rep):
            return Derivation(rep, RuleLabel.Ax), 0, 0, False

        for member, path in members.items():
            step = unary_logical_step(member)
            if step is None:
                continue
            label, premise = step
            d, used, height, lim = self.solve(premise, grishin, depth - len(path) - 1)
            if d is None:
                return None, 0, 0, lim
            node = Derivation(member, label, (d,))
            return via_display(rep, path, node), used, height + len(path) + 1, False

        for member, path in members.items():
            step = binary_logical_step(member)
            if step is None:
                continue
            label, (first, second) = step
            if not (_balanced(first) and _balanced(second)):
                continue
            room = depth - len(path) - 1
            d1, used1, h1, lim1 = self.solve(first, grishin, room)
            if d1 is None:
                limited |= lim1
                continue
            d2, used2, h2, lim2 = self.solve(second, grishin - used1, room)
            if d2 is None:
                # a failure that tripped no budget holds under any budget, so
                # a cheaper proof of the first premise could not rescue it
                limited |= lim2
                continue
            node = Derivation(member, label, (d1, d2))
            return (via_display(rep, path, node), used1 + used2,
                    max(h1, h2) + len(path) + 1, False)

        for member, path in members.items():
            for label, premise in grishin_steps(member):
                if grishin <= 0:
                    self._trip("grishin")
                    limited = True
                    continue
                d, used, height, lim = self.solve(premise, grishin - 1, depth - len(path) - 1)
                if d is None:
                    limited |= lim
                    continue
                node = Derivation(member, label, (d,))
                return via_display(rep, path, node), used + 1, height + len(path) + 1, False

        return None, 0, 0, limited


def _balanced(s: Sequent) -> bool:
    """Cheap necessary conditions for derivability."""
    return family_excess(s) == (0, 0) and not atom_balance(s)


def _text(s: Sequent) -> str:
    return s.text


def _cancel(start: Sequent, path: tuple) -> tuple:
    seqs, labels = [start], []
    for label, seq in path:
        if len(seqs) > 1 and seqs[-2] == seq:
            seqs.pop()
            labels.pop()
        else:
            seqs.append(seq)
            labels.append(label)
    return tuple(zip(labels, seqs[1:]))


def _invert(path: tuple, start: Sequent) -> tuple:
    """Reverse a display path read upward from ``start``."""
    seqs = [start] + [seq for _, seq in path]
    return tuple((INVERSE[label], seqs[i]) for i, (label, _) in reversed(list(enumerate(path))))


def prove(goal: Sequent, budgets: Budgets | None = None, *, memo: bool = True) -> ProveOutcome:
    """Search for a Cut-free derivation of ``goal``.

    ``Unprovable`` is only reported when no budget influenced the search;
    otherwise a failed search yields ``BudgetExceeded`` naming the budget that
    cut it short.
    """
    if budgets is None:
        budgets = Budgets.for_goal(goal)
    if not _balanced(goal):
        return Unprovable()
    search = _Search(budgets, memo)
    try:
        d, used, height, limited = search.solve(goal, budgets.grishin_max, budgets.depth_max)
    except _NodeBudgetTripped:
        return BudgetExceeded("nodes")
    if d is None:
        if limited:
            return BudgetExceeded(sorted(search.tripped)[0] if search.tripped else "grishin")
        return Unprovable()
    report = check(d, allow_cut=False)
    if not report.ok:
        raise AssertionError(f"prover produced an invalid derivation: {report.first_error}")
    return Proved(d)


@dataclass(frozen=True)
class Stats:
    budgets: Budgets
    census: ConnectiveCensus

    @property
    def length(self) -> int:
        return self.census.length


def stats(goal: Sequent) -> Stats:
    return Stats(Budgets.for_goal(goal), census(goal))
