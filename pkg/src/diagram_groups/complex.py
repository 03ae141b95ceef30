"""Vertices and cubes of the complex K(P, w), convex windows and distances.

Vertices of K(P, w) are reduced diagrams with top ``w``.  A cube is given by
a base vertex ``U`` and a thin diagram ``phi`` under it; its vertices are the
reduced products ``U * phi_J`` for the sub-diagrams ``phi_J`` of ``phi``.

A window K_{U,V} has one vertex ``U * H`` for every prefix ``H`` of
``W = U^-1 V``.  Coordinates of its embedding into the unit cube I^N are
indexed by the canonical cell order of ``W``; a vertex maps to the indicator
vector of the cells in its prefix.
"""

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .diagram import compose, concat, degenerate, inverse, thin, atomic
from .errors import (
    BallTooLarge,
    InsufficientBall,
    InvalidCube,
    NotAVertex,
    NotReduced,
    NotThin,
    PointOutsideWindow,
    TopMismatch,
)
from .poset import bits, cell_poset, ideal_masks, is_thin, match_prefix, restrict

DEFAULT_BALL_CAP = 500_000
ZERO = Fraction(0)
ONE = Fraction(1)


# --------------------------------------------------------------------------
# vertices and balls
# --------------------------------------------------------------------------

def neighbors(u):
    """Reduced diagrams obtained from ``u`` by attaching one atomic diagram."""
    bot = u.bot
    out = {}
    for offset, lhs, rhs in u.presentation.applications(bot):
        v = compose(u, atomic(bot, offset, lhs, rhs, u.presentation))
        out[v] = None
    return sorted(out, key=lambda d: d.sort_key())


@dataclass
class VertexGraph:
    """Vertices (canonically sorted) and adjacency of a ball in the 1-skeleton."""

    top: tuple
    max_cells: int
    vertices: list
    adjacency: list

    def __post_init__(self):
        self.index = {v: i for i, v in enumerate(self.vertices)}

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, d):
        return d in self.index

    def distances_from(self, i):
        dist = {i: 0}
        queue = deque([i])
        while queue:
            a = queue.popleft()
            for b in self.adjacency[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    queue.append(b)
        return dist


def ball(word, max_cells, presentation=None, cap=DEFAULT_BALL_CAP):
    """All reduced diagrams with top ``word`` and at most ``max_cells`` cells.

    Removing a bottom-most cell of a reduced diagram gives a reduced diagram
    with one cell fewer, so expanding layer by layer reaches every vertex.
    """
    if max_cells < 0:
        raise ValueError("max_cells must be >= 0")
    root = degenerate(word, presentation)
    seen = {root: None}
    layer = [root]
    edges = set()
    for size in range(max_cells):
        nxt = []
        for u in layer:
            for v in neighbors(u):
                if len(v.cells) > max_cells:
                    continue
                edges.add((u, v) if u.sort_key() < v.sort_key() else (v, u))
                if v not in seen:
                    seen[v] = None
                    nxt.append(v)
                    if len(seen) > cap:
                        raise BallTooLarge(f"more than {cap} vertices (reached {len(seen)})")
        layer = nxt
    vertices = sorted(seen, key=lambda d: d.sort_key())
    index = {v: i for i, v in enumerate(vertices)}
    adjacency = [[] for _ in vertices]
    for a, b in edges:
        i, j = index[a], index[b]
        adjacency[i].append(j)
        adjacency[j].append(i)
    for adj in adjacency:
        adj.sort()
    return VertexGraph(root.top, max_cells, vertices, adjacency)


# --------------------------------------------------------------------------
# cubes
# --------------------------------------------------------------------------

def thin_placements(presentation, word, max_dim=None, maximal=False):
    """Sets of pairwise disjoint relation applications on ``word``.

    Yields sorted lists of ``(position, lhs, rhs)``.  With ``maximal=True``
    only sets to which no further application can be added are produced.
    """
    apps = presentation.applications(word)
    by_pos = {}
    for app in apps:
        by_pos.setdefault(app[0], []).append(app)
    n = len(word)

    def rec(pos, acc):
        if pos >= n:
            yield list(acc)
            return
        yield from rec(pos + 1, acc)
        if max_dim is not None and len(acc) >= max_dim:
            return
        for app in by_pos.get(pos, ()):
            acc.append(app)
            yield from rec(pos + len(app[1]), acc)
            acc.pop()

    for placement in rec(0, []):
        if maximal:
            used = set()
            for pos, lhs, _ in placement:
                used.update(range(pos, pos + len(lhs)))
            if any(used.isdisjoint(range(p, p + len(l))) for p, l, _ in apps):
                continue
        yield placement


class CubeSpec:
    """The cube C(U, phi); cells of ``phi`` are E_1..E_k from left to right.

    ``U`` must be reduced and ``phi`` thin.  By default ``concat(U, phi)``
    must be reduced too, i.e. ``U`` is the minimal vertex of the cube; with
    ``minimal=False`` any vertex may serve as the base (vertices are still
    the reduced products ``U phi_J``).
    """

    def __init__(self, base, phi, minimal=True):
        if base.bot != phi.top:
            raise TopMismatch("top(phi) must equal bot(base)")
        if not is_thin(phi):
            raise NotThin(repr(phi))
        if not base.is_reduced:
            raise NotReduced(repr(base))
        if minimal and not concat(base, phi).is_reduced:
            raise InvalidCube("concat(base, phi) is not reduced")
        self.minimal = minimal
        self.base = base
        self.phi = phi
        self.dim = len(phi.cells)

    def __repr__(self):
        return f"CubeSpec(base={self.base!r}, phi={self.phi!r})"

    def __eq__(self, other):
        return isinstance(other, CubeSpec) and self.base == other.base and self.phi == other.phi

    def __hash__(self):
        return hash((self.base, self.phi))

    @classmethod
    def from_any_base(cls, base, phi):
        """Normalise C(base, phi) when some cells of ``phi`` cancel against ``base``.

        Returns ``(cube, flip)`` where ``flip`` is the bitmask of those cells.
        The vertex set is unchanged; a cube-local coordinate ``y_i`` measured
        from ``base`` becomes ``1 - y_i`` for ``i`` in ``flip``.
        """
        if base.bot != phi.top:
            raise TopMismatch("top(phi) must equal bot(base)")
        if not is_thin(phi):
            raise NotThin(repr(phi))
        lay = base.layout
        plo = phi.layout
        flip = 0
        for i, e in enumerate(phi.cells):
            edges = plo.tops[i]
            c = lay.producer.get(lay.bottom[edges[0]])
            if (
                c is not None
                and lay.bots[c] == tuple(lay.bottom[x] for x in edges)
                and base.cells[c].lhs == e.rhs
            ):
                flip |= 1 << i
        if not flip:
            return cls(base, phi), 0
        full = (1 << len(phi.cells)) - 1
        phi_s = restrict(phi, flip)
        new_base = compose(base, phi_s)
        new_phi = compose(inverse(phi_s), restrict(phi, full & ~flip))
        return cls(new_base, new_phi), flip

    def face(self, mask):
        """phi_J for the subset ``J`` given as a bitmask over E_1..E_k."""
        return restrict(self.phi, mask)

    def vertex(self, mask):
        return compose(self.base, self.face(mask))

    def vertices(self):
        return [self.vertex(m) for m in range(1 << self.dim)]

    def to_json(self):
        return {"base": self.base.to_json(), "phi": self.phi.to_json()}


def cubes_at(u, max_dim, min_dim=1):
    """Cubes whose minimal vertex is ``u`` (each cube of K listed once)."""
    lay = u.layout
    bottom = lay.bottom
    out = []
    for placement in thin_placements(u.presentation, u.bot, max_dim):
        if len(placement) < min_dim:
            continue
        ok = True
        for pos, lhs, rhs in placement:
            edges = bottom[pos:pos + len(lhs)]
            c = lay.producer.get(edges[0])
            if c is not None and lay.bots[c] == edges and u.cells[c].lhs == rhs:
                ok = False
                break
        if ok:
            out.append(CubeSpec(u, thin(u.bot, placement, u.presentation)))
    return out


def rebase(q, u2):
    """Thin ``theta`` with C(u2, theta) == q, for a vertex ``u2`` of ``q``."""
    m = match_prefix(compose(inverse(q.base), u2), q.phi)
    if m is None:
        raise NotAVertex(repr(u2))
    mask = 0
    for c in m:
        mask |= 1 << c
    rest = ((1 << q.dim) - 1) & ~mask
    return compose(inverse(q.face(mask)), q.face(rest))


def cube_vertices(y, theta):
    """Vertex set of C(y, theta) for any thin ``theta`` (not necessarily normalized)."""
    k = len(theta.cells)
    return [compose(y, restrict(theta, m)) for m in range(1 << k)]


# --------------------------------------------------------------------------
# windows and the embedding into I^N
# --------------------------------------------------------------------------

class ConvexWindow:
    """The full subcomplex K_{U,V} on the vertices ``U * H`` with ``H < U^-1 V``."""

    def __init__(self, u, v, w_diag=None):
        if u.top != v.top:
            raise TopMismatch("window endpoints need the same top word")
        self._set_diagram(compose(inverse(u), v) if w_diag is None else w_diag)
        self._u, self._v = u, v

    @classmethod
    def deferred(cls, w_diag, make_u, make_v):
        """A window known by its diagram; the endpoints are built on first use."""
        win = cls.__new__(cls)
        win._set_diagram(w_diag)
        win._u, win._v = make_u, make_v
        return win

    def _set_diagram(self, w_diag):
        self.w_diag = w_diag
        self.poset = cell_poset(w_diag)
        self.N = len(w_diag.cells)
        self.full = (1 << self.N) - 1
        self.thin = is_thin(w_diag)
        self._masks = None
        self._pred_tables = None

    @property
    def u(self):
        if callable(self._u):
            self._u = self._u()
        return self._u

    @property
    def v(self):
        if callable(self._v):
            self._v = self._v()
        return self._v

    def tabulate(self):
        """Precompute predecessor unions per byte; worth it before many cube tests."""
        if self._pred_tables is None:
            self._pred_tables = []
            for base in range(0, self.N, 8):
                table = [0] * 256
                for b in range(1, 256):
                    i = base + (b & -b).bit_length() - 1
                    table[b] = table[b & (b - 1)] | (self.poset.preds[i] if i < self.N else 0)
                self._pred_tables.append(table)

    def pred_union(self, mask):
        """Union of the predecessor masks of the cells in ``mask``."""
        out = 0
        if self._pred_tables is None:
            preds = self.poset.preds
            while mask:
                low = mask & -mask
                out |= preds[low.bit_length() - 1]
                mask ^= low
            return out
        for table in self._pred_tables:
            out |= table[mask & 255]
            mask >>= 8
        return out

    @property
    def cell_index(self):
        return list(self.w_diag.cells)

    def ideal_masks(self, cap=None):
        if self._masks is None:
            self._masks = ideal_masks(self.w_diag, cap) if cap else ideal_masks(self.w_diag)
        return self._masks

    def vertex(self, mask):
        return compose(self.u, restrict(self.w_diag, mask))

    def vertex_set(self):
        return {self.vertex(m): m for m in self.ideal_masks()}

    def locate(self, x):
        """Ideal mask of vertex ``x`` in the window, or ``None``."""
        if x.top != self.u.top:
            return None
        m = match_prefix(compose(inverse(self.u), x), self.w_diag)
        if m is None:
            return None
        mask = 0
        for c in m:
            mask |= 1 << c
        return mask

    def embed_vertex(self, ideal):
        mask = getattr(ideal, "mask", ideal)
        if not self.poset.is_ideal(mask):
            raise PointOutsideWindow("not an order ideal of the window diagram")
        return EmbeddedPoint(self, tuple(ONE if mask >> i & 1 else ZERO for i in range(self.N)))

    def point(self, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.N:
            raise PointOutsideWindow(f"expected {self.N} coordinates, got {len(coords)}")
        p = EmbeddedPoint(self, coords)
        if not self.contains(p):
            raise PointOutsideWindow(repr(coords))
        return p

    def contains(self, p):
        ones, frac = p.masks()
        if any(c < 0 or c > 1 for c in p.coords):
            return False
        return not self.pred_union(ones | frac) & ~ones

    def face_is_cube(self, fixed_ones, free):
        """Is the face of I^N with these 1-coordinates and free coordinates in the image?"""
        return not self.pred_union(fixed_ones | free) & ~fixed_ones

    def common_cube(self, a, b):
        """Do two embedded points lie in one cube of the window?"""
        ones_a, frac_a = a
        ones_b, frac_b = b
        fixed1 = ones_a & ones_b & ~frac_a & ~frac_b
        zeros_a = self.full & ~ones_a & ~frac_a
        zeros_b = self.full & ~ones_b & ~frac_b
        free = self.full & ~fixed1 & ~(zeros_a & zeros_b)
        return self.face_is_cube(fixed1, free)


@dataclass(frozen=True)
class EmbeddedPoint:
    window: ConvexWindow
    coords: tuple

    def masks(self):
        ones = frac = 0
        for i, c in enumerate(self.coords):
            if c == 1:
                ones |= 1 << i
            elif c != 0:
                frac |= 1 << i
        return ones, frac

    def sq_dist(self, other):
        diffs = [a - b for a, b in zip(self.coords, other.coords)]
        den = 1
        for d in diffs:
            den = math.lcm(den, d.denominator)
        return Fraction(sum((d.numerator * (den // d.denominator)) ** 2 for d in diffs), den * den)


def embed_vertex(win, h):
    return win.embed_vertex(h)


def window(u, v):
    return ConvexWindow(u, v)


# --------------------------------------------------------------------------
# star property
# --------------------------------------------------------------------------

def check_star_property(win, ambient, vertex_set=None):
    """Every cube meets the window's vertex set in a face or not at all.

    Cubes through each window vertex ``Y`` are enumerated as C(Y, theta) for
    the maximal thin ``theta`` under ``Y``; every cube meeting the window is a
    face of one of these.  Vertex sets are computed by actual diagram products.
    """
    if vertex_set is None:
        vertex_set = set(win.vertex_set())
    else:
        vertex_set = set(vertex_set)
    for y in vertex_set:
        if y not in ambient:
            raise InsufficientBall(f"window vertex with {len(y.cells)} cells outside the ball")
        if len(y.cells) + 1 > ambient.max_cells:
            raise InsufficientBall("ball does not contain the 1-neighbourhood of the window")
    pres = win.u.presentation
    for y in sorted(vertex_set, key=lambda d: d.sort_key()):
        for placement in thin_placements(pres, y.bot, maximal=True):
            theta = thin(y.bot, placement, pres)
            verts = cube_vertices(y, theta)
            hit = [m for m, x in enumerate(verts) if x in vertex_set]
            if not hit:
                continue
            lo, hi = hit[0], 0
            for m in hit:
                lo &= m
                hi |= m
            if len(hit) != 1 << bin(hi & ~lo).count("1"):
                return False
    return True


# --------------------------------------------------------------------------
# distances
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceBounds:
    lower_sq: Fraction
    upper: float
    exact: bool
    N: int

    @property
    def lower(self):
        return math.sqrt(self.lower_sq)

    @property
    def upper_sq(self):
        """Exact when ``exact``; otherwise a rational rounded up from the path length."""
        if self.exact:
            return self.lower_sq
        if math.isinf(self.upper):
            return None
        return Fraction(math.ceil(self.upper * self.upper * 10**12) + 1, 10**12)

    def to_json(self):
        ub = self.upper_sq
        return {
            "lower_sq": fmt_fraction(self.lower_sq),
            "upper_sq": None if ub is None else fmt_fraction(ub),
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "N": self.N,
        }


def fmt_fraction(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text):
    return Fraction(text.strip())


def _layer_path(win, a, b):
    """Vertex masks from ``a`` down to ``a & b`` then up to ``b``, one layer per step."""
    path = [a]
    cur = a
    while cur & ~b:
        drop = [i for i in win.poset.maximal_inside(cur) if not b >> i & 1]
        for i in drop:
            cur &= ~(1 << i)
        path.append(cur)
    while cur != b:
        add = [i for i in win.poset.minimal_outside(cur) if b >> i & 1]
        for i in add:
            cur |= 1 << i
        path.append(cur)
    return path


def distance_bounds(win, p, q, refine=4, max_nodes=400, skip_upper_from=None):
    """Certified bounds on the intrinsic distance between two window points.

    The lower bound is the Euclidean distance in I^N.  The upper bound is the
    length of the shortest path found through auxiliary nodes (window
    vertices and points at multiples of ``1/refine`` on window edges) whose
    consecutive nodes share a cube of the window.  Thin windows fill I^N, so
    there both bounds coincide.  When ``skip_upper_from`` is given and the
    lower bound already reaches it, no path is searched and the upper bound
    is reported as infinite.
    """
    for pt in (p, q):
        if not win.contains(pt):
            raise PointOutsideWindow(repr(pt.coords))
    lower_sq = p.sq_dist(q)
    if win.thin or p.coords == q.coords:
        return DistanceBounds(lower_sq, math.sqrt(lower_sq), win.thin, win.N)
    if skip_upper_from is not None and lower_sq >= skip_upper_from ** 2:
        return DistanceBounds(lower_sq, math.inf, False, win.N)

    pm, qm = p.masks(), q.masks()
    vertex_masks = set()
    for ones, frac in (pm, qm):
        free = bits(frac)
        if len(free) <= 8:
            for r in range(len(free) + 1):
                for sub in combinations(free, r):
                    m = ones
                    for i in sub:
                        m |= 1 << i
                    vertex_masks.add(m)
    vertex_masks.update(_layer_path(win, pm[0], qm[0]))
    if len(vertex_masks) < max_nodes:
        try:
            all_masks = win.ideal_masks(cap=max_nodes)
        except Exception:
            all_masks = None
        if all_masks is not None and len(vertex_masks | set(all_masks)) <= max_nodes:
            vertex_masks.update(all_masks)

    nodes = [(pm, p.coords), (qm, q.coords)]
    for m in sorted(vertex_masks):
        nodes.append(((m, 0), tuple(ONE if m >> i & 1 else ZERO for i in range(win.N))))
    if refine and refine >= 2:
        vm = sorted(vertex_masks)
        grid = []
        for m in vm:
            for i in win.poset.minimal_outside(m):
                if m | 1 << i in vertex_masks:
                    for s in range(1, refine):
                        t = Fraction(s, refine)
                        coords = tuple(
                            t if j == i else (ONE if m >> j & 1 else ZERO) for j in range(win.N)
                        )
                        grid.append(((m, 1 << i), coords))
        if len(nodes) + len(grid) <= max_nodes:
            nodes.extend(grid)

    win.tabulate()
    fl = [tuple(float(c) for c in coords) for _, coords in nodes]
    dist = [math.inf] * len(nodes)
    dist[0] = 0.0
    done = [False] * len(nodes)
    heap = [(0.0, 0)]
    while heap:
        d, a = heapq.heappop(heap)
        if done[a]:
            continue
        done[a] = True
        if a == 1:
            break
        ma = nodes[a][0]
        ca = fl[a]
        for b, (mb, _) in enumerate(nodes):
            if done[b] or not win.common_cube(ma, mb):
                continue
            step = math.dist(ca, fl[b])
            if d + step < dist[b]:
                dist[b] = d + step
                heapq.heappush(heap, (dist[b], b))
    return DistanceBounds(lower_sq, max(dist[1], math.sqrt(lower_sq)), False, win.N)


# --------------------------------------------------------------------------
# random windows for the convexity check
# --------------------------------------------------------------------------

def random_reduced(rng, word, max_cells, presentation=None, steps=None):
    """A reduced diagram with top ``word``, grown by random atomic multiplications."""
    d = degenerate(word, presentation)
    target = rng.randint(1, max_cells)
    for _ in range(steps or 4 * max_cells):
        if len(d.cells) >= target:
            break
        apps = d.presentation.applications(d.bot)
        offset, lhs, rhs = apps[rng.randrange(len(apps))]
        nxt = compose(d, atomic(d.bot, offset, lhs, rhs, d.presentation))
        if len(nxt.cells) <= max_cells:
            d = nxt
    return d


def random_window(rng, ambient, max_w, base_cells=2, tries=200):
    """A window K_{U, UW} with ``|W| <= max_w`` whose vertices fit in ``ambient`` with margin."""
    bases = [u for u in ambient.vertices if len(u.cells) <= base_cells]
    for _ in range(tries):
        u = bases[rng.randrange(len(bases))]
        w = random_reduced(rng, u.bot, max_w, u.presentation)
        win = ConvexWindow(u, compose(u, w), w_diag=w)
        verts = win.vertex_set()
        if all(len(x.cells) < ambient.max_cells for x in verts):
            return win, verts
    raise InsufficientBall("could not place a window inside the ambient ball")


def _square_corner(win, masks):
    """An ideal ``a | i`` where ``i`` and ``j`` are both addable to ``a``, or None."""
    for a in sorted(masks, key=lambda m: (bin(m).count("1"), m)):
        free = win.poset.minimal_outside(a)
        if len(free) >= 2:
            return a | 1 << free[0]
    return None


def convexity_report(samples, max_w, seed=0, ambient_cells=7, base_cells=1, ambient=None):
    """Star property on ``samples`` random windows, plus one corrupted control."""
    import random

    rng = random.Random(seed)
    if ambient is None:
        ambient = ball("xxx", ambient_cells)
    results = []
    control = None
    for _ in range(samples):
        win, verts = random_window(rng, ambient, max_w, base_cells)
        ok = check_star_property(win, ambient, verts)
        results.append({"N": win.N, "vertices": len(verts), "ok": ok})
        if control is None:
            drop = _square_corner(win, verts.values())
            if drop is not None:
                # the square through the dropped corner now meets the set in three vertices
                bad = [x for x, m in verts.items() if m != drop]
                control = not check_star_property(win, ambient, bad)
    return {
        "samples": samples,
        "max_w": max_w,
        "seed": seed,
        "all_true": all(r["ok"] for r in results),
        "max_N": max((r["N"] for r in results), default=0),
        "negative_control_detected": control,
        "windows": results,
    }
