import pytest
from hypothesis import given, settings

from lgrishin.core import Atom, Sequent, census, inp, out, parse_formula, render, sequent_length
from lgrishin.prover import Proved, prove
from lgrishin.reduction import (
    CnfFormula, DimacsError, E_atom, E_formula, F, G, H, Literal, meet_type,
    parse_dimacs, reduce, to_dimacs,
)

import gen

EXAMPLE = "p cnf 2 2\n1 -2 0\n-1 -2 0\n"
MARK1 = "p1 (/) (p1 (\\) p1)"
MARK2 = "p2 (/) (p2 (\\) p2)"


@pytest.fixture
def example():
    return parse_dimacs(EXAMPLE)


def test_parse_dimacs_examples(example):
    assert example.num_vars == 2
    assert example.as_ints() == [[1, -2], [-1, -2]]
    single = parse_dimacs("p cnf 1 1\n1 0\n")
    assert single.clauses == ((Literal(1, 1),),)


@pytest.mark.parametrize("text, message", [
    ("p cnf 1 1\n0\n", "empty clause"),
    ("1 0\n", "before"),
    ("", "missing"),
    ("p cnf 1 1\np cnf 1 1\n1 0\n", "duplicate"),
    ("p cnf 1 1\n2 0\n", "out of range"),
    ("p cnf 1 1\n1\n", "not terminated"),
    ("p cnf 1 2\n1 0\n", "announces"),
    ("p cnf x 1\n1 0\n", "malformed"),
    ("p cnf 1 1\n1 a 0\n", "not an integer"),
])
def test_dimacs_errors(text, message):
    with pytest.raises(DimacsError, match=message):
        parse_dimacs(text)


def test_dimacs_comments_and_multiline_clauses():
    cnf = parse_dimacs("c hello\np cnf 3 2\n1 -2\n3 0 -1 0\n")
    assert cnf.as_ints() == [[1, -2, 3], [-1]]


@given(gen.cnfs())
def test_dimacs_round_trip(cnf):
    assert parse_dimacs(to_dimacs(cnf)) == cnf


def test_E_atoms(example):
    assert render(E_atom(1, 1, 1, example)) == MARK1
    assert E_atom(1, 1, 0, example) == Atom("p1")
    both = CnfFormula.from_ints(1, [[1, -1]])
    assert render(E_atom(1, 1, 0, both)) == MARK1
    assert render(E_atom(1, 1, 1, both)) == MARK1


def test_worked_example_types(example):
    assert render(E_formula(1, 0, example)) == f"p1 * ({MARK2})"
    assert render(E_formula(1, 1, example)) == f"({MARK1}) * p2"
    assert render(E_formula(2, 0, example)) == f"({MARK1}) * ({MARK2})"
    assert render(E_formula(2, 1, example)) == "p1 * p2"
    assert render(H(1, example)) == render(H(2, example)) == "p1 * p2"
    assert render(G(2, example)) == "(((p1 * p2) * (p1 * p2)) (/) (p1 (\\) p1)) (/) (p2 (\\) p2)"
    assert render(G(0, example)) == "(p1 * p2) * (p1 * p2)"


def test_single_clause_and_single_variable_shapes():
    cnf = CnfFormula.from_ints(1, [[1]])
    assert H(1, cnf) == Atom("p1")
    assert G(0, cnf) == H(1, cnf)
    assert render(E_formula(1, 1, cnf)) == MARK1


def test_meet_type_template():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    assert meet_type(a, b, c) == parse_formula("(a / ((c / c) \\ c)) * ((c / c) \\ b)")
    # six connectives: three slashes, two backslashes and the product
    assert census(meet_type(a, b, c)).formula_total == 6


def test_F_is_the_meet_of_E1_and_E0(example):
    assert F(1, example) == meet_type(E_formula(1, 1, example), E_formula(1, 0, example),
                                      H(1, example))


def test_reduce_single_variable_single_clause():
    seq = reduce(parse_dimacs("p cnf 1 1\n1 0\n"))
    assert seq.text == (f"(({MARK1}) / ((p1 / p1) \\ p1)) * ((p1 / p1) \\ p1) |- {MARK1}")


def test_reduce_worked_example(example):
    seq = reduce(example)
    f1, f2 = F(1, example), F(2, example)
    assert seq.text == f"({f1.text}) * ({f2.text}) |- {G(2, example).text}"
    assert census(seq).formula_total == 42


def predicted_length(cnf: CnfFormula) -> int:
    """8mn + 2N + 2n - 2, with N the number of literal occurrences.

    Each F_j contributes |E_j(1)| + |E_j(0)| + 5|H_j| + 6 connectives, the
    product of the F_j adds m - 1, and G_n has mn - 1 + 2n.
    """
    m, n = cnf.num_vars, cnf.num_clauses
    occurrences = sum(len(set(c)) for c in cnf.clauses)
    return 8 * m * n + 2 * occurrences + 2 * n - 2


@given(gen.cnfs(max_vars=4, max_clauses=4))
def test_length_closed_form(cnf):
    seq = reduce(cnf)
    assert sequent_length(seq) == predicted_length(cnf)
    assert census(seq).structural_total == 0


@given(gen.cnfs())
def test_reduce_is_deterministic(cnf):
    again = parse_dimacs(to_dimacs(cnf))
    assert reduce(cnf).text == reduce(again).text


def test_satisfied_by(example):
    assert example.satisfied_by((1, 0))
    assert not example.satisfied_by((1, 1))


@settings(max_examples=15, deadline=None)
@given(gen.cnfs(max_vars=2, max_clauses=2))
def test_join_and_meet_lemmas_are_provable(cnf):
    for j in range(1, cnf.num_vars + 1):
        for t in (0, 1):
            e, h, f = E_formula(j, t, cnf), H(j, cnf), F(j, cnf)
            assert isinstance(prove(Sequent(inp(e), out(h))), Proved)
            assert isinstance(prove(Sequent(inp(f), out(e))), Proved)


def test_cnf_validation():
    with pytest.raises(ValueError):
        CnfFormula.from_ints(1, [[2]])
    with pytest.raises(ValueError):
        CnfFormula.from_ints(1, [[]])
    with pytest.raises(ValueError):
        CnfFormula.from_ints(1, [])
