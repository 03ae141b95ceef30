"""Action of a spherical diagram on vertices, cubes and points of K(P, w).

For a cube Q = C(U, phi) and an element g, :func:`translation_data` finds a
window K_{U0,V0} holding both Q and gQ.  Inside its embedding in I^N the
action restricted to Q is affine and is given coordinate by coordinate in
:func:`act_point`.

Cube-local coordinates ``y_1..y_k`` are measured from the corner
``U0 = U * phi_{T'}``: ``y_i`` is the coordinate of E_i when i is in T and of
the mirrored cell E_i' otherwise.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .complex import (
    ConvexWindow,
    EmbeddedPoint,
    ball,
    cubes_at,
    distance_bounds,
    fmt_fraction,
)
from .diagram import compose, degenerate, from_cells_tracked, inverse
from .errors import InvariantViolation, NotReduced, NotSpherical, TopMismatch
from .poset import glb, match_prefix, restrict, split

ONE = Fraction(1)
ZERO = Fraction(0)


class GroupElement:
    """A reduced spherical diagram, i.e. an element of D(P, w)."""

    __slots__ = ("diag",)

    def __init__(self, diag):
        if not diag.is_spherical:
            raise NotSpherical("top and bottom words differ")
        if not diag.is_reduced:
            raise NotReduced("diagram is not reduced")
        self.diag = diag

    @classmethod
    def identity(cls, word, presentation=None):
        return cls(degenerate(word, presentation))

    @property
    def word(self):
        return self.diag.top

    def __mul__(self, other):
        return GroupElement(compose(self.diag, other.diag))

    def inverse(self):
        return GroupElement(inverse(self.diag))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.diag == other.diag

    def __hash__(self):
        return hash(self.diag)

    def __repr__(self):
        return f"GroupElement({self.diag!r})"


def act_vertex(g, u):
    if u.top != g.word:
        raise TopMismatch("vertex top must be the base word of the group")
    return compose(g.diag, u)


@dataclass
class TranslationData:
    q: object
    w0: object
    t_set: frozenset
    w1: object
    l_set: frozenset
    w2: object
    w_full: object
    f_map: dict  # j -> W index of F_j (j in L') or F_j' (j in L); 1-based j
    e_index: dict  # i -> W index of coordinate c_i (E_i or E_i'); 1-based i
    window: ConvexWindow = field(repr=False)

    @property
    def k(self):
        return self.q.dim

    @property
    def u0(self):
        return self.window.u

    @property
    def v0(self):
        return self.window.v

    @property
    def N(self):
        return self.window.N

    @property
    def t_prime(self):
        return frozenset(range(1, self.k + 1)) - self.t_set

    @property
    def l_prime(self):
        return frozenset(range(1, self.k + 1)) - self.l_set

    def coordinate_order(self):
        """W indices ordered as c_1..c_k, then F_j (j in L'), then the remaining cells."""
        order = [self.e_index[i] for i in range(1, self.k + 1)]
        taken = set(order)
        for j in sorted(self.l_prime):
            c = self.f_map[j]
            if c not in taken:
                order.append(c)
                taken.add(c)
        order.extend(c for c in range(self.N) if c not in taken)
        return order

    def case_partition(self):
        T, L = self.t_set, self.l_set
        Tp, Lp = self.t_prime, self.l_prime
        return {"L&T": L & T, "L&T'": L & Tp, "L'&T": Lp & T, "L'&T'": Lp & Tp}

    def corner(self, y):
        """The vertex of Q with 0/1 cube-local coordinates ``y``."""
        mask = 0
        for i, yi in enumerate(y, start=1):
            inside = (yi == 1) if i in self.t_set else (yi == 0)
            if inside:
                mask |= 1 << (i - 1)
        return self.q.vertex(mask)


def _mask(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def translation_data(g, q, gu=None, w0=None, verify=True):
    """Assemble the data describing how ``g`` moves the cube ``q``.

    ``gu`` and ``w0`` may be passed in when already known for ``q.base``.
    With ``verify`` the construction is cross-checked against glb and the
    prefix structure of W; scans switch this off once it has been tested.
    """
    U, phi, k = q.base, q.phi, q.dim
    if U.top != g.word:
        raise TopMismatch("cube base must have the group's top word")
    if gu is None:
        gu = compose(g.diag, U)
    if w0 is None:
        w0 = compose(inverse(U), gu)
    pl, w0l = phi.layout, w0.layout

    # T: cells of phi that already occur at the top of W0
    t_cell = {}
    for i in range(k):
        tops = pl.tops[i]
        c = w0l.consumer.get(tops[0])
        if (
            c is not None
            and w0l.tops[c] == tops
            and w0.cells[c].lhs == phi.cells[i].lhs
            and w0.cells[c].rhs == phi.cells[i].rhs
        ):
            t_cell[i] = c
    T = sorted(t_cell)
    Tp = [i for i in range(k) if i not in t_cell]
    phi_t = restrict(phi, _mask(T))
    if verify and phi_t != glb(w0, phi):
        raise InvariantViolation("phi_T differs from glb(W0, phi)")
    phi_tp = restrict(phi, _mask(Tp))
    inv_tp = inverse(phi_tp)

    # W1 = phi_{T'}^-1 o W0, tracking where each cell goes
    n_e = len(inv_tp.cells)
    w1, order1 = from_cells_tracked(g.diag.presentation, inv_tp.top, inv_tp.cells + w0.cells)
    pos1 = {src: c for c, src in enumerate(order1)}
    if verify and not w1.is_reduced:
        raise InvariantViolation("W1 is not reduced")

    # L: cells of phi cancelled by cells at the bottom of W1
    w1l = w1.layout
    fprime = {}
    for j in range(k):
        p0 = pl.tops[j][0]
        ln = len(phi.cells[j].lhs)
        edges = w1l.bottom[p0:p0 + ln]
        p = w1l.producer.get(edges[0])
        if (
            p is not None
            and w1l.bots[p] == edges
            and w1.cells[p].lhs == phi.cells[j].rhs
            and w1.cells[p].rhs == phi.cells[j].lhs
        ):
            fprime[j] = p
    L = sorted(fprime)
    Lp = [j for j in range(k) if j not in fprime]
    phi_l = restrict(phi, _mask(L))
    if verify and phi_l != glb(inverse(w1), phi):
        raise InvariantViolation("phi_L differs from glb(W1^-1, phi)")
    phi_lp = restrict(phi, _mask(Lp))

    # W = W1 o phi_{L'}
    n1 = len(w1.cells)
    w, order2 = from_cells_tracked(g.diag.presentation, w1.top, w1.cells + phi_lp.cells)
    pos2 = {src: c for c, src in enumerate(order2)}
    if verify and not w.is_reduced:
        raise InvariantViolation("W1 o phi_L' is not reduced")

    e_index = {}
    for i in range(k):
        if i in t_cell:
            e_index[i + 1] = pos2[pos1[n_e + t_cell[i]]]
        else:
            e_index[i + 1] = pos2[pos1[Tp.index(i)]]
    f_map = {}
    for j in range(k):
        if j in fprime:
            f_map[j + 1] = pos2[fprime[j]]
        else:
            f_map[j + 1] = pos2[n1 + Lp.index(j)]
    if len(set(f_map.values())) != len(f_map):
        raise InvariantViolation("F-cell map is not injective")

    # W2 = W1 phi_L: W without the cells F_j and F_j'
    w2 = restrict(w, ((1 << len(w.cells)) - 1) & ~_mask(f_map.values()))
    if verify:
        if w2 != compose(w1, phi_l):
            raise InvariantViolation("W1 phi_L is not the part of W above phi_L'")
        if match_prefix(compose(inv_tp, phi_t), w) is None:
            raise InvariantViolation("W lacks the prefix phi_T'^-1 phi_T")
        m2 = match_prefix(w2, w)
        if m2 is None:
            raise InvariantViolation("W2 is not a prefix of W")
        suffix = split(w, _mask(m2))[1]
        if suffix != compose(inverse(phi_l), phi_lp):
            raise InvariantViolation("W lacks the suffix phi_L^-1 phi_L'")

    return TranslationData(
        q=q,
        w0=w0,
        t_set=frozenset(i + 1 for i in T),
        w1=w1,
        l_set=frozenset(j + 1 for j in L),
        w2=w2,
        w_full=w,
        f_map=f_map,
        e_index=e_index,
        window=ConvexWindow.deferred(
            w, lambda: compose(U, phi_tp), lambda: compose(gu, phi_lp)
        ),
    )


def from_base_coords(td, b):
    """Convert cube coordinates measured from ``q.base`` to the window convention.

    ``act_point`` measures c_i from U_0, so coordinates of cells in T' flip.
    """
    return tuple(v if i in td.t_set else 1 - Fraction(v) for i, v in enumerate(b, start=1))


def to_base_coords(td, y):
    return from_base_coords(td, y)


def act_point(td, y):
    """Return ``(y, g y)`` as points of the window's embedding in I^N."""
    y = [Fraction(v) for v in y]
    if len(y) != td.k:
        raise ValueError(f"expected {td.k} cube coordinates")
    if any(v < 0 or v > 1 for v in y):
        raise ValueError("cube coordinates must lie in [0, 1]")
    N = td.N
    ycoords = [ZERO] * N
    for i, v in enumerate(y, start=1):
        ycoords[td.e_index[i]] = v
    z = [ONE] * N
    for j, c in td.f_map.items():
        yj = y[j - 1]
        if j in td.l_set:
            z[c] = ONE - yj if j in td.t_set else yj
        else:
            z[c] = yj if j in td.t_set else ONE - yj
    return EmbeddedPoint(td.window, tuple(ycoords)), EmbeddedPoint(td.window, tuple(z))


def displacement(g, q, y, refine=4, max_nodes=400, td=None, skip_upper_from=None):
    """Bounds on d(y, g y); ``y`` is measured from the minimal vertex ``q.base``."""
    if td is None:
        td = translation_data(g, q)
    p, gp = act_point(td, from_base_coords(td, y))
    return distance_bounds(
        td.window, p, gp, refine=refine, max_nodes=max_nodes, skip_upper_from=skip_upper_from
    )


def vertex_displacement(g, u, refine=4, max_nodes=400):
    gu = act_vertex(g, u)
    win = ConvexWindow(u, gu)
    p = win.embed_vertex(0)
    q = win.embed_vertex(win.full)
    return distance_bounds(win, p, q, refine=refine, max_nodes=max_nodes)


def _round_up_sq(x):
    return Fraction(math.ceil(x * x * 10**12) + 1, 10**12)


def min_displacement_scan(g, ball_cells, max_dim, refine=0, max_nodes=64, progress=None, verify=False):
    """Scan vertices of a ball and midpoints of cubes based there.

    Every cube is visited once, at its minimal vertex.  Returns a JSON-ready
    report with the smallest certified lower bound, the smallest upper bound
    and the smallest exact displacement, each with a witness.
    """
    verts = ball(g.word, ball_cells, g.diag.presentation).vertices
    best = {}

    def offer(name, value, witness):
        cur = best.get(name)
        if cur is None or value < cur[0]:
            best[name] = (value, witness)

    counts = {"vertices": 0, "cubes": 0, "exact": 0}
    vertex_min_lower = None
    exact_le_sqrt2 = 0
    midpoint_exact_below = 0
    for idx, u in enumerate(verts):
        gu = compose(g.diag, u)
        w0 = compose(inverse(u), gu)
        win = ConvexWindow(u, gu, w_diag=w0)
        cur = best.get("upper")
        b = distance_bounds(
            win, win.embed_vertex(0), win.embed_vertex(win.full), refine=refine,
            max_nodes=max_nodes, skip_upper_from=None if cur is None else cur[0],
        )
        counts["vertices"] += 1
        wit = {"vertex": u.to_json()["cells"], "top": list(u.top)}
        offer("lower", b.lower_sq, wit)
        offer("upper", b.upper, wit)
        if vertex_min_lower is None or b.lower_sq < vertex_min_lower:
            vertex_min_lower = b.lower_sq
        if b.exact:
            counts["exact"] += 1
            offer("exact", b.lower_sq, wit)
            if b.lower_sq <= 2:
                exact_le_sqrt2 += 1
        for q in cubes_at(u, max_dim):
            td = translation_data(g, q, gu=gu, w0=w0, verify=verify)
            mid = [Fraction(1, 2)] * q.dim
            cur = best.get("upper")
            b = displacement(
                g, q, mid, refine=refine, max_nodes=max_nodes, td=td,
                skip_upper_from=None if cur is None else cur[0],
            )
            counts["cubes"] += 1
            wit = {"vertex": u.to_json()["cells"], "phi": q.phi.to_json()["cells"], "dim": q.dim}
            offer("lower", b.lower_sq, wit)
            offer("upper", b.upper, wit)
            if b.exact:
                counts["exact"] += 1
                offer("exact", b.lower_sq, wit)
                offer("midpoint_exact", b.lower_sq, wit)
                if b.lower_sq <= 2:
                    exact_le_sqrt2 += 1
                if b.lower_sq < Fraction(9, 4):
                    midpoint_exact_below += 1
        if progress is not None:
            progress(idx + 1, len(verts))

    def entry(name, as_fraction=True):
        if name not in best:
            return None, None
        v, w = best[name]
        return (fmt_fraction(v) if as_fraction else v), w

    min_lower, wit_lower = entry("lower")
    min_upper, wit_upper = entry("upper", as_fraction=False)
    min_exact, wit_exact = entry("exact")
    min_mid, wit_mid = entry("midpoint_exact")
    return {
        "ball_cells": ball_cells,
        "max_dim": max_dim,
        "points_scanned": counts["vertices"] + counts["cubes"],
        "vertices_scanned": counts["vertices"],
        "cubes_scanned": counts["cubes"],
        "exact_points": counts["exact"],
        "min_lower_sq": min_lower,
        "min_upper": min_upper,
        "min_upper_sq": None if min_upper is None else fmt_fraction(_round_up_sq(min_upper)),
        "min_exact_sq": min_exact,
        "min_midpoint_exact_sq": min_mid,
        "vertex_min_lower_sq": None if vertex_min_lower is None else fmt_fraction(vertex_min_lower),
        "exact_at_most_2": exact_le_sqrt2,
        "midpoint_exact_below_9_4": midpoint_exact_below,
        "witness_vertex": wit_lower,
        "witness_cube": wit_mid,
        "witness_upper": wit_upper,
        "witness_exact": wit_exact,
    }
