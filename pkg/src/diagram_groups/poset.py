"""Cell generations, the predecessor order, prefixes and greatest lower bounds.

Cells are referred to by their canonical index in the owning diagram.  Order
ideals are stored as Python ints used as bitmasks (bit ``i`` = cell ``i``),
which keeps enumeration of large prefix lattices cheap.
"""

from dataclasses import dataclass

from .diagram import Diagram, _canonicalize, degenerate
from .errors import TooManyPrefixes, TopMismatch

DEFAULT_IDEAL_CAP = 1 << 20


@dataclass(frozen=True)
class CellPoset:
    owner: Diagram
    generation: tuple
    covers: frozenset
    # preds[j]: bitmask of direct predecessors of cell j
    preds: tuple

    @property
    def size(self):
        return len(self.generation)

    def below(self, i, j):
        """Transitive ``cell_i < cell_j``."""
        seen, stack = 0, [j]
        while stack:
            k = stack.pop()
            m = self.preds[k]
            if m >> i & 1:
                return True
            new = m & ~seen
            seen |= new
            stack.extend(_bits(new))
        return False

    def is_ideal(self, mask):
        for i in _bits(mask):
            if self.preds[i] & ~mask:
                return False
        return True

    def minimal_outside(self, mask):
        """Cells not in ``mask`` whose predecessors all lie in ``mask``."""
        return [i for i in range(self.size) if not mask >> i & 1 and not self.preds[i] & ~mask]

    def maximal_inside(self, mask):
        succ_hit = 0
        for i in _bits(mask):
            succ_hit |= self.preds[i] & mask
        return [i for i in _bits(mask) if not succ_hit >> i & 1]


@dataclass(frozen=True)
class PrefixIdeal:
    owner: Diagram
    mask: int

    @property
    def members(self):
        return frozenset(_bits(self.mask))

    def __len__(self):
        return bin(self.mask).count("1")


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def bits(mask):
    return list(_bits(mask))


def cell_poset(d):
    lay = d.layout
    covers = set()
    preds = [0] * len(d.cells)
    for j, t in enumerate(lay.tops):
        for e in t:
            i = lay.producer.get(e)
            if i is not None:
                covers.add((i, j))
                preds[j] |= 1 << i
    return CellPoset(d, tuple(lay.generation), frozenset(covers), tuple(preds))


def is_thin(d):
    return all(g == 1 for g in d.layout.generation)


def match_prefix(h, w):
    """Embed ``h`` as a prefix of ``w``.

    Returns the list ``m`` with ``m[i]`` = index of the cell of ``w`` that
    plays the role of cell ``i`` of ``h``, or ``None`` when ``h`` is not a
    prefix.  Each edge of ``w`` is consumed by at most one cell, so the
    embedding is forced.
    """
    if h.top != w.top:
        return None
    if len(h.cells) > len(w.cells):
        return None
    hl, wl = h.layout, w.layout
    edge = {i: i for i in range(len(h.top))}
    out = []
    for i, e in enumerate(h.cells):
        t = tuple(edge[x] for x in hl.tops[i])
        c = wl.consumer.get(t[0])
        if c is None or wl.tops[c] != t:
            return None
        wc = w.cells[c]
        if wc.lhs != e.lhs or wc.rhs != e.rhs:
            return None
        for x, y in zip(hl.bots[i], wl.bots[c]):
            edge[x] = y
        out.append(c)
    return out


def restrict(w, mask):
    """The prefix of ``w`` formed by the cells in ``mask`` (assumed an ideal)."""
    lay = w.layout
    cells = {
        i: [w.cells[i].lhs, w.cells[i].rhs, list(lay.tops[i]), list(lay.bots[i])]
        for i in _bits(mask)
    }
    entries, _, _, _ = _canonicalize(list(range(len(w.top))), cells)
    return Diagram(w.presentation, w.top, entries)


def split(w, mask):
    """``(prefix, suffix)`` with ``concat(prefix, suffix) == w``."""
    lay = w.layout
    inside = {}
    outside = {}
    for i, e in enumerate(w.cells):
        rec = [e.lhs, e.rhs, list(lay.tops[i]), list(lay.bots[i])]
        (inside if mask >> i & 1 else outside)[i] = rec
    entries, _, frontier, _ = _canonicalize(list(range(len(w.top))), inside)
    prefix = Diagram(w.presentation, w.top, entries)
    low, _, _, _ = _canonicalize(frontier, outside)
    bot_word = tuple(lay.labels[e] for e in frontier)
    return prefix, Diagram(w.presentation, bot_word, low)


def is_prefix(h, w):
    """The suffix ``F`` with ``concat(h, F) == w``, or ``None`` if ``h`` is not a prefix."""
    m = match_prefix(h, w)
    if m is None:
        return None
    mask = 0
    for c in m:
        mask |= 1 << c
    return split(w, mask)[1]


def count_ideals(poset, cap=None):
    """Number of order ideals, stopping early once ``cap`` is exceeded."""
    n = 0
    for _ in _ideal_masks(poset):
        n += 1
        if cap is not None and n > cap:
            return n
    return n


def _ideal_masks(poset):
    # canonical order is a linear extension: predecessors have smaller index
    size = poset.size
    preds = poset.preds
    stack = [(0, 0)]
    while stack:
        i, mask = stack.pop()
        if i == size:
            yield mask
            continue
        stack.append((i + 1, mask))
        if not preds[i] & ~mask:
            stack.append((i + 1, mask | 1 << i))


def ideal_masks(w, cap=DEFAULT_IDEAL_CAP):
    """All order ideals of ``w``'s cell poset as bitmasks, smallest cells first."""
    poset = cell_poset(w)
    if cap is not None and count_ideals(poset, cap) > cap:
        raise TooManyPrefixes(f"more than {cap} prefixes")
    return sorted(_ideal_masks(poset), key=lambda m: (bin(m).count("1"), m))


def prefixes(w, cap=DEFAULT_IDEAL_CAP):
    """Yield ``(PrefixIdeal, prefix diagram)`` for every prefix of ``w``."""
    for mask in ideal_masks(w, cap):
        yield PrefixIdeal(w, mask), restrict(w, mask)


def glb(u, v):
    """Greatest lower bound of ``u`` and ``v`` in the prefix order.

    Both diagrams are replayed in lockstep: a cell of ``u`` is peeled when the
    frontier edges it consumes correspond to edges consumed by an identically
    labelled cell of ``v``.  A peelable cell stays peelable until taken, so
    the fixpoint is the largest common prefix.
    """
    if u.top != v.top:
        raise TopMismatch("glb needs equal top words")
    if not u.cells or not v.cells:
        return degenerate(u.top, u.presentation)
    if u == v:
        return u
    ul, vl = u.layout, v.layout
    edge = {i: i for i in range(len(u.top))}
    taken = 0
    progress = True
    while progress:
        progress = False
        for i, e in enumerate(u.cells):
            if taken >> i & 1:
                continue
            try:
                t = tuple(edge[x] for x in ul.tops[i])
            except KeyError:
                continue
            c = vl.consumer.get(t[0])
            if c is None or vl.tops[c] != t:
                continue
            vc = v.cells[c]
            if vc.lhs != e.lhs or vc.rhs != e.rhs:
                continue
            for x, y in zip(ul.bots[i], vl.bots[c]):
                edge[x] = y
            taken |= 1 << i
            progress = True
    return restrict(u, taken)
