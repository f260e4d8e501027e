import itertools
import json
from pathlib import Path

import pytest
from hypothesis import given, settings

from lgrishin.calculus import check
from lgrishin.core import parse_sequent as seq
from lgrishin.prover import Budgets
from lgrishin.reduction import CnfFormula, E_formula, H, parse_dimacs, reduce
from lgrishin.witness import (
    MAX_BRUTE_FORCE_VARS, WitnessError, brute_force_sat, build_witness, identity,
    join_lemma, marker_lemma, roundtrip,
)

import gen

EXAMPLE = CnfFormula.from_ints(2, [[1, -2], [-1, -2]])
CORPUS = Path(__file__).parent / "data" / "witness_corpus.json"


def load_corpus():
    return [CnfFormula.from_ints(c["num_vars"], c["clauses"]) for c in json.loads(CORPUS.read_text())]


def evaluate(clauses, values):
    """Direct evaluation, independent of ``CnfFormula.satisfied_by``."""
    return all(any((values[abs(l) - 1] == 1) == (l > 0) for l in c) for c in clauses)


def test_brute_force_examples():
    assert brute_force_sat(EXAMPLE) == (0, 0)
    assert EXAMPLE.satisfied_by((1, 0))
    assert brute_force_sat(CnfFormula.from_ints(1, [[1], [-1]])) is None


def test_brute_force_guard():
    big = CnfFormula.from_ints(MAX_BRUTE_FORCE_VARS + 1, [[1]])
    with pytest.raises(ValueError):
        brute_force_sat(big)


@settings(max_examples=200)
@given(gen.cnfs(max_vars=4, max_clauses=4))
def test_brute_force_returns_lexicographically_first_model(cnf):
    clauses = cnf.as_ints()
    models = [v for v in itertools.product((0, 1), repeat=cnf.num_vars) if evaluate(clauses, v)]
    assert brute_force_sat(cnf) == (models[0] if models else None)


def test_identity_and_marker_lemmas_are_cut_free():
    f = seq("p * (q (/) r) |- p").lhs.formula
    d = identity(f)
    assert check(d).ok and d.conclusion.text == f"{f.text} |- {f.text}"
    d = marker_lemma(1)
    assert check(d).ok and d.conclusion == seq("p1 (/) (p1 (\\) p1) |- p1")


def test_join_lemmas_on_worked_example():
    for j in (1, 2):
        for t in (0, 1):
            d = join_lemma(E_formula(j, t, EXAMPLE), H(j, EXAMPLE))
            assert check(d).ok


def test_worked_example_witness():
    trace = []
    d = build_witness(EXAMPLE, (0, 0), trace=trace)
    assert d.conclusion == reduce(EXAMPLE)
    report = check(d, allow_cut=True)
    # two meet replacements and one rewrite of a second clause-2 marker
    assert report.ok and report.cut_count == 3
    assert trace == ["TensorL", "Repl", "Repl", "TensorL", "TensorL",
                     "Move", "RDiffR", "Repl", "Move", "RDiffR", "TensorR"]


def test_witness_needs_cut():
    d = build_witness(EXAMPLE, (1, 0))
    assert not check(d).ok
    assert check(d, allow_cut=True).ok


@pytest.mark.parametrize("values", [(1, 1), (0,), (2, 0)])
def test_bad_assignments_are_rejected(values):
    with pytest.raises(WitnessError):
        build_witness(EXAMPLE, values)


def test_every_model_gives_a_witness():
    for cnf in load_corpus()[:20]:
        goal = reduce(cnf)
        for values in itertools.product((0, 1), repeat=cnf.num_vars):
            if cnf.satisfied_by(values):
                d = build_witness(cnf, values)
                assert d.conclusion == goal and check(d, allow_cut=True).ok


@settings(max_examples=25, deadline=None)
@given(gen.cnfs(max_vars=3, max_clauses=3))
def test_witness_for_first_model(cnf):
    values = brute_force_sat(cnf)
    if values is None:
        return
    d = build_witness(cnf, values)
    assert d.conclusion == reduce(cnf) and check(d, allow_cut=True).ok


def test_corpus_shape():
    corpus = load_corpus()
    assert len(corpus) == 50 and corpus[0] == EXAMPLE
    shapes = {(c.num_vars, c.num_clauses) for c in corpus}
    assert shapes == {(m, n) for m in (1, 2, 3) for n in (1, 2, 3)}


def test_roundtrip_summaries():
    v = roundtrip(EXAMPLE)
    assert v.consistent and v.summary == "consistent: both positive" and v.witness_ok
    v = roundtrip(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n"))
    assert v.consistent and v.summary == "consistent: both negative" and v.witness_ok is None


def test_roundtrip_inconclusive_is_not_consistent():
    v = roundtrip(EXAMPLE, Budgets(0, 0))
    assert v.inconclusive and not v.consistent
    assert v.summary.startswith("inconclusive:")
