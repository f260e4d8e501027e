import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgrishin.core import (
    CHILD_POLARITY, IN, OUT, STRUCT_POLARITY, Atom, Compound, Leaf, Node, Op,
    ParseError, PolarityError, Sequent, atom_balance, census, inp, out,
    parse_formula, parse_sequent, parse_structure, render, sequent_length,
)

import gen

p1 = Atom("p1")
MARKER = Compound(Op.RDIFF, p1, Compound(Op.LDIFF, p1, p1))


def test_parse_atom():
    assert parse_formula("p1") == p1


def test_parse_marker_with_redundant_outer_parens():
    assert parse_formula("(p1 (/) (p1 (\\) p1))") == MARKER
    assert parse_formula("p1 (/) (p1 (\\) p1)") == MARKER


def test_flat_chain_needs_parentheses():
    with pytest.raises(ParseError, match="missing parentheses") as err:
        parse_formula("p1 * p2 * p3")
    assert err.value.offset == 8


@pytest.mark.parametrize("text", ["", "p1 *", "(p1 * p2", "p1 * p2)", "P1", "p1 ** p2",
                                  "p1 .*. p2", "p1 |- p2"])
def test_malformed_formulas(text):
    with pytest.raises(ParseError):
        parse_formula(text)


def test_parse_error_offsets_count_bytes():
    with pytest.raises(ParseError) as err:
        parse_formula("p1 * ⊗")
    assert err.value.offset == 5


def test_parse_sequent_examples():
    s = parse_sequent("p |- p")
    assert s.lhs == inp(Atom("p")) and s.rhs == out(Atom("p"))
    s = parse_sequent("a .*. b |- a * b")
    assert s.lhs == Node(Op.PROD, inp(Atom("a")), inp(Atom("b")))
    assert s.rhs == out(Compound(Op.PROD, Atom("a"), Atom("b")))


def test_output_connective_on_the_left_is_rejected():
    with pytest.raises(PolarityError) as err:
        parse_sequent("a .(+). b |- c")
    assert err.value.side == "left"


def test_parse_structure_polarity():
    s = parse_structure("a ./. b", OUT)
    assert s.polarity is OUT
    with pytest.raises(PolarityError):
        parse_structure("a ./. b", IN)


def test_render_examples():
    assert render(MARKER) == "p1 (/) (p1 (\\) p1)"
    h = parse_formula("p1 * p2")
    g = Compound(Op.RDIFF,
                 Compound(Op.RDIFF, Compound(Op.PROD, h, h), Compound(Op.LDIFF, p1, p1)),
                 Compound(Op.LDIFF, Atom("p2"), Atom("p2")))
    assert render(g) == "(((p1 * p2) * (p1 * p2)) (/) (p1 (\\) p1)) (/) (p2 (\\) p2)"


def test_render_sequent():
    assert render(parse_sequent("(a .*. b) .(/). c |- d")) == "(a .*. b) .(/). c |- d"


def test_round_trip_thousand_random_formulas():
    rng = random.Random(7)
    for _ in range(1000):
        f = gen.random_formula(rng, depth=4)
        assert parse_formula(render(f)) == f


@given(gen.formulas)
def test_formula_round_trip(f):
    assert parse_formula(render(f)) == f


@given(gen.structures(IN), gen.structures(OUT))
def test_structure_round_trip(x, y):
    assert parse_structure(render(x), IN) == x
    assert parse_structure(render(y), OUT) == y


@given(gen.sequents)
def test_sequent_round_trip(s):
    back = parse_sequent(render(s))
    assert back == s and back.lhs.pols == s.lhs.pols


def grammar_ok(s, want) -> bool:
    """Input X ::= A | X .*. X | X .(/). P | P .(\\). X; output dually."""
    if type(s) is Leaf:
        return s.polarity is want
    kids = {
        Op.PROD: (IN, IN), Op.RDIFF: (IN, OUT), Op.LDIFF: (OUT, IN),
        Op.COPROD: (OUT, OUT), Op.OVER: (OUT, IN), Op.UNDER: (IN, OUT),
    }[s.op]
    own = IN if s.op in (Op.PROD, Op.RDIFF, Op.LDIFF) else OUT
    return own is want and grammar_ok(s.left, kids[0]) and grammar_ok(s.right, kids[1])


def _nodes(s, path=()):
    if type(s) is Node:
        yield path
        yield from _nodes(s.left, path + (0,))
        yield from _nodes(s.right, path + (1,))


def _swap(s, path, op):
    if not path:
        return Node(op, s.left, s.right)
    if path[0] == 0:
        return Node(s.op, _swap(s.left, path[1:], op), s.right)
    return Node(s.op, s.left, _swap(s.right, path[1:], op))


@settings(max_examples=200)
@given(gen.sequents, st.data())
def test_single_connective_mutations(s, data):
    paths = [("lhs", p) for p in _nodes(s.lhs)] + [("rhs", p) for p in _nodes(s.rhs)]
    if not paths:
        return
    side, path = data.draw(st.sampled_from(paths))
    new_op = data.draw(st.sampled_from(list(Op)))
    lhs = _swap(s.lhs, path, new_op) if side == "lhs" else s.lhs
    rhs = _swap(s.rhs, path, new_op) if side == "rhs" else s.rhs
    valid = grammar_ok(lhs, IN) and grammar_ok(rhs, OUT)
    old_op = _get(s.lhs if side == "lhs" else s.rhs, path).op
    if STRUCT_POLARITY[new_op] is not STRUCT_POLARITY[old_op]:
        assert not valid
    if valid:
        Sequent(lhs, rhs)
    else:
        with pytest.raises(PolarityError):
            Sequent(lhs, rhs)


def _get(s, path):
    for step in path:
        s = s.right if step else s.left
    return s


def test_child_polarity_table_matches_grammar():
    for op, (pl, pr) in CHILD_POLARITY.items():
        node = Node(op, Leaf(Atom("a"), pl), Leaf(Atom("b"), pr))
        assert grammar_ok(node, STRUCT_POLARITY[op])


def test_census_examples():
    c = census(parse_sequent("p |- p"))
    assert (c.formula_total, c.structural_total, c.input_family, c.output_family) == (0, 0, 0, 0)
    c = census(parse_sequent("(p1 (/) (p1 (\\) p1)) |- p1"))
    assert (c.formula_total, c.structural_total, c.input_family, c.output_family) == (2, 0, 0, 2)


def _count(x):
    """Independent tree walk: (formula, structural, input family, output family).

    The two families count formula connectives only.
    """
    if type(x) is Atom:
        return (0, 0, 0, 0)
    if type(x) is Leaf:
        return _count(x.formula)
    a, b = _count(x.left), _count(x.right)
    own = (0, 1) if type(x) is Node else (1, 0)
    fam = (0, 0) if type(x) is Node else (1, 0) if x.op in (Op.PROD, Op.OVER, Op.UNDER) else (0, 1)
    return (a[0] + b[0] + own[0], a[1] + b[1] + own[1], a[2] + b[2] + fam[0], a[3] + b[3] + fam[1])


@given(gen.sequents)
def test_census_matches_tree_walk(s):
    c = census(s)
    walk = tuple(x + y for x, y in zip(_count(s.lhs), _count(s.rhs)))
    assert (c.formula_total, c.structural_total, c.input_family, c.output_family) == walk
    assert sequent_length(s) == c.formula_total + c.structural_total == c.length
    assert c.input_family + c.output_family == c.formula_total


@given(gen.structures(IN), gen.structures(IN))
def test_census_is_additive(x, y):
    whole, cx, cy = census(Node(Op.PROD, x, y)), census(x), census(y)
    assert whole.formula_total == cx.formula_total + cy.formula_total
    assert whole.structural_total == cx.structural_total + cy.structural_total + 1
    assert whole.input_family == cx.input_family + cy.input_family
    assert whole.output_family == cx.output_family + cy.output_family


def test_atom_balance():
    assert atom_balance(parse_sequent("p |- p")) == {}
    assert atom_balance(parse_sequent("a |- b")) == {"a": 1, "b": -1}
    assert atom_balance(parse_sequent("(p1 (/) (p1 (\\) p1)) |- p1")) == {}


def test_equality_and_hash_follow_text():
    a = parse_sequent("a .*. b |- c")
    b = parse_sequent("a .*. b |- c")
    assert a == b and hash(a) == hash(b) and len({a, b}) == 1
    assert parse_formula("a * b") != parse_formula("b * a")


def test_atom_names_are_validated():
    with pytest.raises(ValueError):
        Atom("P")
