"""Thompson's group F as D(P, xxx) with P = <x | x = xx>, and the parabolic element g.

The conjugator ``U_n`` below realises a sequence of one-cell conjugations of
``g``; the thin diagram ``phi`` on its bottom path spans a 2n-dimensional cube
containing a point displaced by exactly sqrt(2 + 2/(n+1)).
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .action import GroupElement, act_point, from_base_coords, translation_data
from .complex import CubeSpec, distance_bounds
from .diagram import Presentation, _canonicalize, atomic, compose, from_cells, inverse, thin
from .errors import ClosureTooLarge, CounterexampleFailure, ShapeMismatch, TopMismatch
from .poset import glb, is_thin, match_prefix

UP = (("x",), ("x", "x"))  # C(x, xx)
DOWN = (("x", "x"), ("x",))  # C(xx, x)

_P = Presentation.thompson()


def thompson_presentation():
    return _P


def g_xxx():
    """The 4-cell element g over top ``xxx``."""
    d = from_cells(_P, "xxx", [(0, *UP), (1, *UP), (2, *DOWN), (2, *DOWN)])
    return GroupElement(d)


def g_x():
    """The 8-cell diagram over top ``x`` representing the same element of F."""
    d = from_cells(
        _P,
        "x",
        [(0, *UP), (0, *UP), (0, *UP), (1, *UP), (2, *DOWN), (2, *DOWN), (0, *DOWN), (0, *DOWN)],
    )
    return GroupElement(d)


_LIFT = from_cells(_P, "xxx", [(0, *DOWN), (0, *DOWN)])


def lift_x_to_xxx(d):
    """Isomorphism D(P, x) -> D(P, xxx): cap with two C(xx, x) cells above and mirror below."""
    if d.top != ("x",) or d.bot != ("x",):
        raise TopMismatch("lift expects a spherical diagram over x")
    return compose(compose(_LIFT, d), inverse(_LIFT))


def conj_L(i, v):
    """Attach C(xx, x) above the i-th top edge and C(x, xx) below the i-th bottom edge."""
    if v.top != v.bot:
        raise TopMismatch("conj_L expects a spherical diagram")
    m = len(v.top)
    if not 1 <= i <= m:
        raise IndexError(f"edge index {i} out of range 1..{m}")
    a = atomic(("x",) * (m + 1), i - 1, *DOWN, presentation=_P)
    return compose(compose(a, v), inverse(a))


def l_sequence(n):
    """Edge indices of the conjugations in the order they are applied."""
    written = [1] * (n + 1) + list(range(2 * n + 3, 2, -2)) + list(range(n + 4, 2, -1))
    return list(reversed(written))


def conjugator(n):
    """U_n: the diagram with U_n^-1 g U_n equal to the result of the L-sequence."""
    entries = [(i - 1, *UP) for i in l_sequence(n)]
    return from_cells(_P, "xxx", entries)


def _check_w0_shape(w0, n):
    m = 3 * n + 7
    if w0.top != ("x",) * m or w0.bot != ("x",) * m:
        raise ShapeMismatch(f"W0 is not spherical over x^{m}")
    if len(w0.cells) != 4 or not is_thin(w0):
        raise ShapeMismatch(f"W0 has {len(w0.cells)} cells or is not thin: {w0!r}")
    lay = w0.layout
    uppers = sorted(lay.tops[c] for c, e in enumerate(w0.cells) if (e.lhs, e.rhs) == UP)
    lowers = sorted(lay.tops[c] for c, e in enumerate(w0.cells) if (e.lhs, e.rhs) == DOWN)
    # top edge ids are 0-based positions on the top path x_1..x_{3n+7}
    if uppers != [(0,), (n + 1,)] or lowers != [(3 * n + 3, 3 * n + 4), (3 * n + 5, 3 * n + 6)]:
        raise ShapeMismatch(f"unexpected cell positions: up={uppers} down={lowers}")


@dataclass
class FarleyInstance:
    """The cube, the point and the expected squared displacement for one ``n``.

    ``q`` is C(U_n, phi) with U_n as base although the C(xx, x) cells of phi
    cancel against U_n; ``y`` holds c_1..c_2n measured from U_n phi_{T'}.
    ``q_min`` is the same cube based at its minimal vertex and ``y_min`` the
    same point in that cube's own coordinates.
    """

    n: int
    u: object
    w0: object
    phi: object
    q: CubeSpec
    y: tuple
    q_min: CubeSpec
    y_min: tuple
    expected_sq: Fraction


def farley_phi(n, word):
    placements = [(i + 1, *UP) for i in range(1, n + 1)]
    placements += [(2 * j + 3 - n, *DOWN) for j in range(n + 1, 2 * n + 1)]
    return thin(word, placements, _P)


def farley_point(n):
    d = n + 1
    y = [Fraction(d - i, d) for i in range(1, n)] + [Fraction(n, d)]
    y += [Fraction(2 * n + 1 - i, d) for i in range(n + 1, 2 * n)] + [Fraction(n, d)]
    return tuple(y)


def build_instance(n):
    if n < 1:
        raise ValueError("n must be positive")
    g = g_xxx()
    u = conjugator(n)
    if len(u.bot) != 3 * n + 7:
        raise ShapeMismatch(f"bot(U_n) has {len(u.bot)} edges")
    w0 = compose(inverse(u), compose(g.diag, u))
    _check_w0_shape(w0, n)
    phi = farley_phi(n, u.bot)
    q = CubeSpec(u, phi, minimal=False)
    y = farley_point(n)
    t_set = frozenset(c + 1 for c in match_prefix(glb(w0, phi), phi))
    q_min, flip = CubeSpec.from_any_base(u, phi)
    # window coordinates -> subset coordinates over U_n -> over the minimal vertex
    y_min = []
    for i, t in enumerate(y, start=1):
        a = t if i in t_set else 1 - t
        y_min.append(1 - a if flip >> (i - 1) & 1 else a)
    return FarleyInstance(n, u, w0, phi, q, y, q_min, tuple(y_min), 2 + Fraction(2, n + 1))


def farley_data(n, instance=None):
    """Translation data of the instance together with the points y and g y."""
    inst = build_instance(n) if instance is None else instance
    td = translation_data(g_xxx(), inst.q)
    p, gp = act_point(td, inst.y)
    return inst, td, p, gp


def farley_displacement(n, instance=None):
    """Exact squared displacement of the point y_n; must equal 2 + 2/(n+1).

    Computed in the cube as based at U_n and again from its minimal vertex.
    """
    inst, td, p, gp = farley_data(n, instance)
    if td.N != 2 * n + 4:
        raise CounterexampleFailure(f"n={n}: W has {td.N} cells, expected {2 * n + 4}")
    b = distance_bounds(td.window, p, gp)
    if not b.exact:
        raise CounterexampleFailure(f"n={n}: window is not thin")
    td2 = translation_data(g_xxx(), inst.q_min)
    p2, gp2 = act_point(td2, from_base_coords(td2, inst.y_min))
    b2 = distance_bounds(td2.window, p2, gp2)
    if b2.lower_sq != b.lower_sq or not b2.exact:
        raise CounterexampleFailure(f"n={n}: the two cube bases disagree ({b.lower_sq} vs {b2.lower_sq})")
    if b.lower_sq != inst.expected_sq:
        raise CounterexampleFailure(f"n={n}: got {b.lower_sq}, expected {inst.expected_sq}")
    return b.lower_sq


def farley_report(n):
    expected = _fmt(2 + Fraction(2, n + 1))
    try:
        d2 = farley_displacement(n)
    except CounterexampleFailure as exc:
        return {"n": n, "d_squared": None, "d_float": None, "expected": expected,
                "match": False, "detail": str(exc)}
    return {
        "n": n,
        "d_squared": _fmt(d2),
        "d_float": float(d2) ** 0.5,
        "expected": expected,
        "match": True,
    }


def _fmt(q):
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# conjugates of g with at most four cells
# --------------------------------------------------------------------------

def cell_types(d):
    up = sum(1 for e in d.cells if (e.lhs, e.rhs) == UP)
    return up, len(d.cells) - up


def shape_signature(d):
    """Left-to-right blocks of ``d`` with runs of untouched edges collapsed.

    Each block is either ``"-"`` (a run of edges lying on both the top and
    bottom path) or the canonical sequence of a connected cluster of cells.
    """
    lay = d.layout
    parent = list(range(len(d.cells)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c, t in enumerate(lay.tops):
        for e in t:
            p = lay.producer.get(e)
            if p is not None:
                parent[find(p)] = find(c)
    owner = {}
    for c, t in enumerate(lay.tops):
        for e in t:
            if e < len(d.top):
                owner[e] = find(c)
    blocks = []
    for e in range(len(d.top)):
        tag = owner.get(e, "-")
        if not blocks or blocks[-1][0] != tag:
            blocks.append([tag, []])
        blocks[-1][1].append(e)
    sig = []
    for tag, edges in blocks:
        if tag == "-":
            sig.append("-")
            continue
        members = sorted(c for c in range(len(d.cells)) if find(c) == tag)
        cells = {
            c: [d.cells[c].lhs, d.cells[c].rhs, list(lay.tops[c]), list(lay.bots[c])] for c in members
        }

        entries, _, _, _ = _canonicalize(edges, cells)
        sig.append((len(edges), tuple((e.offset, "".join(e.lhs), "".join(e.rhs)) for e in entries)))
    return tuple(sig)


def family_signature(d):
    """Shape signature with bridge runs dropped, so runs of length zero and more agree."""
    return tuple(b for b in shape_signature(d) if b != "-")


def _one_step_conjugates(d):
    word = d.top
    out = []
    for offset, lhs, rhs in _P.applications(word):
        a = atomic(word, offset, lhs, rhs, _P)
        out.append(compose(compose(inverse(a), d), a))
    return out


def classify_small_conjugates(max_conjugator_cells, max_size=200_000):
    """Closure of g under one-cell conjugations, keeping conjugates with <= 4 cells."""
    if max_conjugator_cells < 1:
        raise ValueError("cap must be >= 1")
    g = g_xxx().diag
    depth = {g: 0}
    queue = deque([g])
    while queue:
        d = queue.popleft()
        if depth[d] >= max_conjugator_cells:
            continue
        for c in _one_step_conjugates(d):
            if len(c.cells) <= 4 and c not in depth:
                depth[c] = depth[d] + 1
                if len(depth) > max_size:
                    raise ClosureTooLarge(f"more than {max_size} conjugates")
                queue.append(c)
    members = sorted(depth, key=lambda x: x.sort_key())
    shapes = {shape_signature(m) for m in members}
    families = {family_signature(m) for m in members}
    # one more step from the retained set: does anything new appear?
    escaped = set()
    for m in members:
        for c in _one_step_conjugates(m):
            if len(c.cells) <= 4 and shape_signature(c) not in shapes:
                escaped.add(shape_signature(c))
    return {
        "cap": max_conjugator_cells,
        "members": len(members),
        "min_cells": min(len(m.cells) for m in members),
        "max_cells": max(len(m.cells) for m in members),
        "all_four_cells": all(len(m.cells) == 4 for m in members),
        "two_of_each_type": all(cell_types(m) == (2, 2) for m in members),
        "contains_g": g in depth,
        "shapes": len(shapes),
        "families": len(families),
        "family_signatures": sorted(map(repr, families)),
        "closed_under_conjugation": not escaped,
    }
