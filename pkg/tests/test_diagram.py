import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diagram_groups.diagram import (
    Diagram,
    Entry,
    Presentation,
    atomic,
    attach,
    compose,
    concat,
    degenerate,
    dipoles,
    from_cells,
    inverse,
    reduce,
    thin,
)
from diagram_groups.errors import (
    AttachMismatch,
    ConcatMismatch,
    InvalidPresentation,
    InvalidWord,
    UnknownRelation,
)
from diagram_groups.thompson import g_xxx

from oracles import P, all_normal_forms, random_diagram, random_dipole_heavy, rng_for

UP = ("x",), ("x", "x")
DOWN = ("x", "x"), ("x",)


def g():
    return g_xxx().diag


# ---- presentations ----

def test_presentation_is_symmetric():
    assert P.has_relation(("x",), ("x", "x"))
    assert P.has_relation(("x", "x"), ("x",))
    assert not P.has_relation(("x",), ("x", "x", "x"))


@pytest.mark.parametrize(
    "gens, rels",
    [([], []), (["x", "x"], []), (["x"], [(("x",), ("y",))]), (["x"], [(("x",), ("x",))]), (["x"], [((), ("x",))])],
)
def test_bad_presentations(gens, rels):
    with pytest.raises(InvalidPresentation):
        Presentation(gens, rels)


def test_presentation_json_round_trip():
    p = Presentation(["a", "b"], [(("a", "b"), ("b", "a")), (("a",), ("a", "a"))])
    assert Presentation.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_parse_word_forms():
    assert P.parse_word("xxx") == ("x", "x", "x")
    assert P.parse_word("x, x") == ("x", "x")
    p = Presentation(["ab", "c"], [(("ab",), ("c",))])
    assert p.parse_word("abcab") == ("ab", "c", "ab")


# ---- degenerate / attach ----

def test_degenerate():
    d = degenerate("xxx")
    assert len(d.cells) == 0 and d.top == d.bot == ("x",) * 3
    assert degenerate("x").bot == ("x",)
    with pytest.raises(InvalidWord):
        degenerate([])
    with pytest.raises(InvalidWord):
        degenerate("xy")


def test_attach():
    d = attach(degenerate("x"), 0, UP)
    assert len(d.cells) == 1 and d.bot == ("x", "x")
    e = attach(degenerate("xxx"), 2, UP)
    assert e.bot == ("x",) * 4 and e.cells == (Entry(2, *UP),)
    with pytest.raises(AttachMismatch):
        attach(degenerate("xxx"), 3, UP)
    with pytest.raises(AttachMismatch):
        attach(degenerate("x"), 0, DOWN)
    with pytest.raises(UnknownRelation):
        attach(degenerate("x"), 0, (("x",), ("x", "x", "x")))


# ---- inverse / concat / reduce / compose ----

def test_inverse_examples():
    assert inverse(degenerate("xx")) == degenerate("xx")
    assert inverse(attach(degenerate("x"), 0, UP)) == atomic("xx", 0, *DOWN)
    gi = inverse(g())
    assert gi != g()
    # mirror by hand: the last merge of g becomes a split of the third edge, the
    # merge above it a split of the new third edge, then the two splits of g
    # become merges, innermost first
    assert gi == from_cells(P, "xxx", [(2, *UP), (2, *UP), (1, *DOWN), (0, *DOWN)])
    assert [len(c.lhs) for c in gi.cells] == [1, 1, 2, 2]


def test_concat_identities():
    d = g()
    assert concat(degenerate("xxx"), d) == d
    assert concat(d, degenerate(d.bot)) == d
    two = concat(atomic("x", 0, *UP), atomic("xx", 0, *DOWN))
    assert len(two.cells) == 2 and two.top == two.bot == ("x",)
    assert dipoles(two) == [(0, 1)]
    with pytest.raises(ConcatMismatch):
        concat(degenerate("xx"), degenerate("xxx"))


def test_reduce_examples():
    assert reduce(concat(atomic("x", 0, *UP), atomic("xx", 0, *DOWN))) == degenerate("x")
    assert reduce(concat(g(), inverse(g()))) == degenerate("xxx")
    assert compose(g(), inverse(g())) == degenerate("xxx")
    assert compose(degenerate("xxx"), g()) == g()


def test_compose_g_squared_regression():
    gg = compose(g(), g())
    assert len(gg.cells) == 8
    assert gg.is_spherical and gg.is_reduced


def test_isotopic_sequences_are_equal():
    a = from_cells(P, "xxx", [(0, *UP), (3, *UP)])
    b = from_cells(P, "xxx", [(2, *UP), (0, *UP)])
    assert a == b and hash(a) == hash(b)
    assert degenerate("xx") != degenerate("xxx")


def test_thin_offsets_are_measured_on_the_word():
    t = thin("xxxx", [(2, *DOWN), (0, *UP)])
    assert t.bot == ("x", "x", "x", "x") and len(t.cells) == 2
    assert t == from_cells(P, "xxxx", [(0, *UP), (3, *DOWN)])
    with pytest.raises(AttachMismatch):
        thin("xxx", [(0, *DOWN), (1, *UP)])


def test_json_round_trip():
    d = g()
    assert Diagram.from_json(json.loads(json.dumps(d.to_json()))) == d
    obj = d.to_json()
    del obj["presentation"]
    assert Diagram.from_json(obj) == d


# ---- properties ----

seeds = st.integers(0, 10**6)


@given(seeds, st.integers(0, 12))
def test_canonical_form_is_a_fixpoint(seed, n):
    d = random_diagram(rng_for(seed), "xxx", n)
    again = from_cells(P, d.top, d.cells)
    assert again == d and again.cells == d.cells


@given(seeds, st.integers(0, 10))
def test_inverse_is_involution_and_swaps_ends(seed, n):
    d = random_diagram(rng_for(seed), "xx", n)
    i = inverse(d)
    assert inverse(i) == d
    assert i.top == d.bot and i.bot == d.top and len(i.cells) == len(d.cells)


@given(seeds, st.integers(0, 12))
def test_reduce_is_idempotent_and_reduced(seed, n):
    d = random_dipole_heavy(rng_for(seed), "xxx", n)
    r = reduce(d)
    assert r.is_reduced and reduce(r) is r
    assert r.top == d.top and r.bot == d.bot
    assert (len(d.cells) - len(r.cells)) % 2 == 0


@given(seeds, st.integers(1, 9))
def test_reduction_is_confluent(seed, n):
    d = random_dipole_heavy(rng_for(seed), "xx", n)
    assert all_normal_forms(d) == {reduce(d)}


@given(seeds, seeds, seeds)
def test_compose_is_associative(s1, s2, s3):
    a = random_diagram(rng_for(s1), "xx", 3)
    b = random_diagram(rng_for(s2), a.bot, 3)
    c = random_diagram(rng_for(s3), b.bot, 3)
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(seeds, st.integers(0, 8))
def test_product_with_inverse_is_trivial(seed, n):
    d = reduce(random_diagram(rng_for(seed), "xxx", n))
    assert compose(d, inverse(d)) == degenerate(d.top)
    assert compose(inverse(d), d) == degenerate(d.bot)
