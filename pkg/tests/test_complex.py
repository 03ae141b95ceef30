import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from diagram_groups.complex import (
    ConvexWindow,
    CubeSpec,
    ball,
    check_star_property,
    convexity_report,
    cube_vertices,
    cubes_at,
    distance_bounds,
    embed_vertex,
    neighbors,
    random_window,
    rebase,
    thin_placements,
    window,
)
from diagram_groups.diagram import atomic, compose, concat, degenerate, inverse, thin
from diagram_groups.errors import (
    BallTooLarge,
    InsufficientBall,
    InvalidCube,
    NotAVertex,
    NotThin,
    PointOutsideWindow,
)
from diagram_groups.poset import ideal_masks
from diagram_groups.thompson import g_xxx

from oracles import P, random_reduced, rng_for

UP = ("x",), ("x", "x")
DOWN = ("x", "x"), ("x",)


def g():
    return g_xxx().diag


@pytest.fixture(scope="module")
def ball5():
    return ball("xxx", 5)


# ---- neighbours and balls ----

def test_neighbors_examples():
    assert neighbors(degenerate("x")) == [atomic("x", 0, *UP)]
    ns = neighbors(degenerate("xxx"))
    assert len(ns) == 5
    assert sorted(len(n.bot) for n in ns) == [2, 2, 4, 4, 4]
    # regression: one neighbour of g cancels its last cell, four add a cell
    assert sorted(len(n.cells) for n in neighbors(g())) == [3, 5, 5, 5, 5]


def test_ball_sizes():
    assert [len(ball("xxx", k)) for k in range(5)] == [1, 6, 23, 84, 326]
    with pytest.raises(BallTooLarge):
        ball("xxx", 4, cap=100)
    with pytest.raises(ValueError):
        ball("xxx", -1)


def test_ball_is_canonically_sorted_and_symmetric(ball5):
    keys = [v.sort_key() for v in ball5.vertices]
    assert keys == sorted(keys)
    for i, adj in enumerate(ball5.adjacency):
        for j in adj:
            assert i in ball5.adjacency[j]
            assert abs(len(ball5.vertices[i].cells) - len(ball5.vertices[j].cells)) == 1


def test_ball_distances_are_cell_counts(ball5):
    # in <x | x = xx> every reduced diagram is at distance |cells| from the base vertex
    d = ball5.distances_from(0)
    assert all(d[i] == len(v.cells) for i, v in enumerate(ball5.vertices))


# ---- cubes ----

def test_thin_placements_counts():
    # non-overlapping choices on xxx: 3 singles, 2 pairs, plus combinations
    pl = list(thin_placements(P, ("x",) * 3))
    assert len(pl) == len(set(map(tuple, pl)))
    assert sum(1 for p in pl if len(p) == 0) == 1
    assert sum(1 for p in pl if len(p) == 1) == 5
    maximal = list(thin_placements(P, ("x",) * 3, maximal=True))
    assert len(maximal) == 3


def test_cube_validation():
    u = atomic("xxx", 0, *UP)
    with pytest.raises(InvalidCube):
        CubeSpec(u, thin(u.bot, [(0, *DOWN)]))
    with pytest.raises(NotThin):
        CubeSpec(degenerate("xxx"), g())
    q = CubeSpec(u, thin(u.bot, [(0, *DOWN)]), minimal=False)
    assert q.vertex(1) == degenerate("xxx")


def test_cube_from_any_base():
    u = atomic("xxx", 0, *UP)
    phi = thin(u.bot, [(0, *DOWN), (3, *UP)])
    q, flip = CubeSpec.from_any_base(u, phi)
    assert flip == 0b01
    assert q.base == degenerate("xxx")
    loose = CubeSpec(u, phi, minimal=False)
    assert set(q.vertices()) == set(loose.vertices())


def test_rebase_examples():
    u = degenerate("xxx")
    q = CubeSpec(u, thin("xxx", [(0, *UP), (1, *DOWN)]))
    assert rebase(q, q.base) == q.phi
    assert rebase(q, compose(q.base, q.phi)) == inverse(q.phi)
    with pytest.raises(NotAVertex):
        rebase(q, g())


@given(st.integers(0, 10**6))
def test_rebase_preserves_vertex_sets(seed):
    rng = rng_for(seed)
    u = random_reduced(rng, "xxx", 4)
    cubes = cubes_at(u, 3)
    assume(cubes)  # a vertex need not be the minimal vertex of any cube
    q = cubes[rng.randrange(len(cubes))]
    verts = q.vertices()
    v = verts[rng.randrange(len(verts))]
    assert set(cube_vertices(v, rebase(q, v))) == set(verts)


def test_cubes_listed_once(ball5):
    seen = set()
    for u in ball5.vertices[:40]:
        for q in cubes_at(u, 2):
            key = frozenset(q.vertices())
            assert key not in seen
            seen.add(key)
            assert min(q.vertices(), key=lambda d: len(d.cells)) == u


# ---- windows ----

def test_window_examples():
    u = random_reduced(random.Random(3), "xxx", 3)
    w = window(u, u)
    assert w.N == 0 and len(w.vertex_set()) == 1
    w = window(degenerate("xxx"), g())
    assert w.N == 4 and len(w.vertex_set()) == 5
    assert w.embed_vertex(0).coords == (0, 0, 0, 0)
    assert w.embed_vertex(w.full).coords == (1, 1, 1, 1)


def test_embedding_of_prefix_ideals():
    w = thin("xxxx", [(i, *UP) for i in range(4)])
    win = window(degenerate("xxxx"), w)
    p = win.embed_vertex(0b0110)
    assert p.coords == (0, 1, 1, 0)
    with pytest.raises(PointOutsideWindow):
        window(degenerate("xxx"), g()).embed_vertex(0b10)


def test_locate_inverts_vertex():
    win = window(degenerate("xxx"), compose(g(), atomic("xxx", 0, *UP)))
    for m in win.ideal_masks():
        assert win.locate(win.vertex(m)) == m
    assert win.locate(atomic("xxx", 2, *UP)) is None


def test_window_points():
    win = window(degenerate("xxx"), g())
    ok = win.point([1, Fraction(1, 2), 0, 0])
    assert win.contains(ok)
    with pytest.raises(PointOutsideWindow):
        win.point([Fraction(1, 2), Fraction(1, 2), 0, 0])
    with pytest.raises(PointOutsideWindow):
        win.point([0, 0, 0])


def test_star_property_examples(ball5):
    u = ball5.vertices[7]
    assert check_star_property(window(u, u), ball5)
    win = window(degenerate("xxx"), compose(atomic("xxx", 0, *UP), atomic("xxxx", 2, *UP)))
    assert check_star_property(win, ball5)
    # drop a corner of the square: the remaining three vertices are not a face
    verts = win.vertex_set()
    bad = [x for x, m in verts.items() if m != 0b01]
    assert not check_star_property(win, ball5, bad)
    with pytest.raises(InsufficientBall):
        check_star_property(window(degenerate("xxx"), g()), ball("xxx", 2))


def test_convexity_report_small(ball5):
    r = convexity_report(6, 3, seed=11, ambient=ball5)
    assert r["all_true"] and r["negative_control_detected"] is not False
    rng = random.Random(5)
    win, verts = random_window(rng, ball5, 3)
    assert all(len(x.cells) < 5 for x in verts)


# ---- distances ----

def test_distance_thin_window_is_exact():
    w = thin("xxxx", [(i, *UP) for i in range(4)])
    win = window(degenerate("xxxx"), w)
    b = distance_bounds(win, win.embed_vertex(0), win.embed_vertex(win.full))
    assert b.exact and b.lower_sq == 4 and b.upper == 2.0 and b.upper_sq == 4


def test_distance_same_point():
    win = window(degenerate("xxx"), g())
    p = win.embed_vertex(0b11)
    b = distance_bounds(win, p, p)
    assert b.lower_sq == 0 and b.upper == 0 and not b.exact


def test_distance_chain_window():
    win = window(degenerate("xxx"), g())
    b = distance_bounds(win, win.embed_vertex(0), win.embed_vertex(win.full))
    assert b.lower_sq == 4 and not b.exact
    assert b.upper == pytest.approx(4.0) and b.upper <= 4.0 + 1e-12
    assert b.upper_sq >= 16


@given(st.integers(0, 10**6))
def test_distance_bounds_are_ordered(seed):
    rng = rng_for(seed)
    w = random_reduced(rng, "xx", 5)
    win = window(degenerate("xx"), w)
    masks = win.ideal_masks()
    a, c = masks[rng.randrange(len(masks))], masks[rng.randrange(len(masks))]
    b = distance_bounds(win, win.embed_vertex(a), win.embed_vertex(c), refine=2)
    assert math.sqrt(b.lower_sq) <= b.upper + 1e-12
    # between vertices, the upper bound never exceeds the Hamming path length
    assert b.upper <= bin(a ^ c).count("1") + 1e-9
    if b.exact:
        assert b.upper_sq == b.lower_sq
    else:
        assert b.upper_sq >= Fraction(b.upper) ** 2


@given(st.integers(0, 10**6))
def test_embedding_is_isometric_on_edges(seed):
    """Adjacent window vertices differ in exactly one coordinate."""
    rng = rng_for(seed)
    u = random_reduced(rng, "xxx", 2)
    w = random_reduced(rng, u.bot, 5)
    win = ConvexWindow(u, compose(u, w))
    verts = win.vertex_set()
    for x, m in verts.items():
        for y in neighbors(x):
            if y in verts:
                assert bin(m ^ verts[y]).count("1") == 1
    assert embed_vertex(win, 0).coords == (0,) * win.N
