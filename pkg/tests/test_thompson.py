import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diagram_groups.action import GroupElement
from diagram_groups.diagram import compose, degenerate, from_cells, inverse
from diagram_groups.errors import TopMismatch
from diagram_groups.poset import cell_poset, is_thin
from diagram_groups.thompson import (
    DOWN,
    UP,
    build_instance,
    cell_types,
    classify_small_conjugates,
    conj_L,
    conjugator,
    family_signature,
    farley_data,
    farley_displacement,
    farley_report,
    g_x,
    g_xxx,
    l_sequence,
    lift_x_to_xxx,
    shape_signature,
)

from oracles import P, random_reduced, rng_for


def test_g():
    g = g_xxx().diag
    assert g.top == g.bot == ("x",) * 3
    assert len(g.cells) == 4 and cell_types(g) == (2, 2)
    assert cell_poset(g).generation == (1, 2, 3, 4)
    assert compose(g, g) != g


def test_lift_of_g_x_is_g():
    assert lift_x_to_xxx(g_x().diag) == g_xxx().diag
    assert lift_x_to_xxx(degenerate("x")) == degenerate("xxx")
    with pytest.raises(TopMismatch):
        lift_x_to_xxx(degenerate("xx"))


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_lift_is_a_homomorphism(s1, s2):
    def element(seed):
        d = random_reduced(rng_for(seed), "x", 6)
        # close it up into a spherical diagram by collapsing the bottom back to x
        while len(d.bot) > 1:
            d = compose(d, from_cells(P, d.bot, [(0, *DOWN)]))
        return d

    a, b = element(s1), element(s2)
    assert lift_x_to_xxx(compose(a, b)) == compose(lift_x_to_xxx(a), lift_x_to_xxx(b))
    assert lift_x_to_xxx(inverse(a)) == inverse(lift_x_to_xxx(a))


def test_conj_L_examples():
    e = degenerate("xxx")
    assert conj_L(2, e) == degenerate("xxxx")
    g = g_xxx().diag
    sizes = [len(conj_L(i, g).cells) for i in range(1, 4)]
    assert all(s in (4, 6) for s in sizes)
    for i in range(1, 4):
        c = conj_L(i, g)
        assert c.top == c.bot == ("x",) * 4
    with pytest.raises(IndexError):
        conj_L(4, g)
    with pytest.raises(TopMismatch):
        conj_L(1, from_cells(P, "xxx", [(0, *UP)]))


def test_conjugator_realises_the_sequence():
    g = g_xxx().diag
    for n in (1, 2, 3):
        v = g
        for i in l_sequence(n):
            v = conj_L(i, v)
        u = conjugator(n)
        assert len(u.bot) == 3 * n + 7
        assert compose(inverse(u), compose(g, u)) == v


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_farley_structure(n):
    inst, td, p, gp = farley_data(n)
    assert td.t_set == {n, 2 * n}
    assert td.l_prime == {1, n + 1}
    assert td.N == 2 * n + 4
    for j in list(range(2, n + 1)) + list(range(n + 2, 2 * n + 1)):
        assert td.f_map[j] == td.e_index[j - 1]
    order = td.coordinate_order()
    diffs = [abs(gp.coords[c] - p.coords[c]) for c in order]
    assert diffs[: 2 * n + 2] == [Fraction(1, n + 1)] * (2 * n + 2)
    assert diffs[2 * n + 2:] == [1, 1]
    assert is_thin(td.w_full)
    assert len(inst.w0.cells) == 4


def test_farley_values():
    assert farley_displacement(1) == 3
    assert farley_displacement(3) == Fraction(5, 2)
    r = farley_report(9)
    assert r["match"] and r["d_squared"] == "11/5"
    assert r["d_float"] == pytest.approx((11 / 5) ** 0.5, abs=1e-12)
    with pytest.raises(ValueError):
        build_instance(0)


def test_farley_point_lies_in_both_frames():
    inst = build_instance(4)
    assert set(inst.q.vertices()) == set(inst.q_min.vertices())
    assert all(0 <= v <= 1 for v in inst.y_min)


def test_shape_signatures():
    g = g_xxx().diag
    assert family_signature(g) == shape_signature(g)
    padded = conj_L(3, g)
    # conjugating at the last edge of g gives a 4-cell element
    assert len(padded.cells) == 4


def test_small_conjugates():
    r = classify_small_conjugates(3)
    assert r["contains_g"] and r["all_four_cells"] and r["two_of_each_type"]
    assert r["min_cells"] == r["max_cells"] == 4
    assert r["families"] <= 8


def test_small_conjugates_close_up():
    r = classify_small_conjugates(6)
    assert r["members"] == 50
    assert r["families"] == 8
    assert r["closed_under_conjugation"]
