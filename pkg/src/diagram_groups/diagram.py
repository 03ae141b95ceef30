"""Semigroup presentations and plane derivation diagrams.

A diagram is stored as a canonical *attachment sequence*: starting from the
degenerate diagram of its top word, cells are attached from below one at a
time.  Each entry records the 0-based position on the current bottom path
(the frontier) together with the relation ``lhs -> rhs`` applied there.

Canonical order is generation-major; inside a generation cells are attached
left to right.  Two isotopic diagrams therefore have identical sequences and
equality is a tuple comparison.

Edges are integers created by replaying the sequence.  The top path always
uses the ids ``0 .. len(top) - 1`` so that two diagrams with the same top word
can be matched edge by edge.
"""

from collections import namedtuple

from .errors import (
    AttachMismatch,
    ConcatMismatch,
    InvalidPresentation,
    InvalidWord,
    InvariantViolation,
    UnknownRelation,
)

Entry = namedtuple("Entry", "offset lhs rhs")


def _as_word(letters):
    if isinstance(letters, str):
        letters = tuple(letters)
    return tuple(letters)


class Presentation:
    """Finite semigroup presentation ``<generators | relations>``.

    Relations are stored symmetrically: passing ``(u, v)`` also registers
    ``(v, u)``.
    """

    __slots__ = ("generators", "relations", "_by_lhs", "_hash")

    def __init__(self, generators, relations):
        gens = tuple(generators)
        if not gens or len(set(gens)) != len(gens):
            raise InvalidPresentation("generators must be a nonempty list of distinct names")
        if any(not isinstance(g, str) or not g for g in gens):
            raise InvalidPresentation("generator names must be nonempty strings")
        genset = set(gens)
        rels = set()
        for pair in relations:
            if len(pair) != 2:
                raise InvalidPresentation(f"relation {pair!r} is not a pair")
            u, v = (tuple(w) for w in pair)
            if not u or not v:
                raise InvalidPresentation("relation words must be nonempty")
            if u == v:
                raise InvalidPresentation(f"relation sides must differ: {u!r}")
            bad = (set(u) | set(v)) - genset
            if bad:
                raise InvalidPresentation(f"unknown letters {sorted(bad)} in relation")
            rels.add((u, v))
            rels.add((v, u))
        self.generators = gens
        self.relations = frozenset(rels)
        by_lhs = {}
        for u, v in sorted(rels):
            by_lhs.setdefault(u, []).append(v)
        self._by_lhs = by_lhs
        self._hash = hash((self.generators, self.relations))

    @classmethod
    def thompson(cls):
        """The presentation ``<x | x = xx>`` whose diagram groups are Thompson's F."""
        return cls(["x"], [(("x",), ("x", "x"))])

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Presentation):
            return NotImplemented
        return self.generators == other.generators and self.relations == other.relations

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Presentation({list(self.generators)!r}, {len(self.relations) // 2} relations)"

    def check_word(self, word):
        word = _as_word(word)
        if not word:
            raise InvalidWord("words must be nonempty")
        for letter in word:
            if letter not in self.generators:
                raise InvalidWord(f"letter {letter!r} is not a generator")
        return word

    def has_relation(self, lhs, rhs):
        return (tuple(lhs), tuple(rhs)) in self.relations

    def applications(self, word):
        """All ``(offset, lhs, rhs)`` that can be attached below ``word``."""
        out = []
        n = len(word)
        for lhs, rhss in self._by_lhs.items():
            m = len(lhs)
            for i in range(n - m + 1):
                if word[i:i + m] == lhs:
                    for rhs in rhss:
                        out.append((i, lhs, rhs))
        out.sort()
        return out

    def parse_word(self, text):
        """Parse ``"xxx"``, ``"x x x"`` or ``"x,x,x"`` into a word."""
        text = text.strip()
        if "," in text or " " in text:
            letters = [t for t in text.replace(",", " ").split() if t]
        elif all(len(g) == 1 for g in self.generators):
            letters = list(text)
        else:
            letters = _greedy_split(text, self.generators)
        return self.check_word(letters)

    def to_json(self):
        pairs = sorted({tuple(sorted(p)) for p in self.relations})
        return {
            "generators": list(self.generators),
            "relations": [[list(u), list(v)] for u, v in pairs],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["generators"], [tuple(map(tuple, r)) for r in obj["relations"]])
        except (KeyError, TypeError) as exc:
            raise InvalidPresentation(f"bad presentation JSON: {exc}") from None


def _greedy_split(text, generators):
    names = sorted(generators, key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        for g in names:
            if text.startswith(g, i):
                out.append(g)
                i += len(g)
                break
        else:
            raise InvalidWord(f"cannot split {text!r} into generators")
    return out


class _Layout:
    """Replay of a canonical sequence: per-cell edge lists and adjacency maps."""

    __slots__ = ("tops", "bots", "labels", "bottom", "producer", "consumer", "generation")

    def __init__(self, top, entries):
        labels = list(top)
        frontier = list(range(len(top)))
        tops, bots, generation = [], [], []
        producer, consumer = {}, {}
        for idx, (offset, lhs, rhs) in enumerate(entries):
            t = tuple(frontier[offset:offset + len(lhs)])
            start = len(labels)
            labels.extend(rhs)
            b = tuple(range(start, start + len(rhs)))
            frontier[offset:offset + len(lhs)] = b
            g = 1
            for e in t:
                consumer[e] = idx
                p = producer.get(e)
                if p is not None and generation[p] >= g:
                    g = generation[p] + 1
            for e in b:
                producer[e] = idx
            tops.append(t)
            bots.append(b)
            generation.append(g)
        self.tops = tops
        self.bots = bots
        self.labels = labels
        self.bottom = tuple(frontier)
        self.producer = producer
        self.consumer = consumer
        self.generation = generation


def _replay(presentation, top, entries):
    """Validate an arbitrary attachment sequence; return a cell structure.

    The structure is ``(top_edges, cells, labels)`` with
    ``cells[key] = [lhs, rhs, tops, bots]`` keyed by entry index.
    """
    labels = list(top)
    frontier = list(range(len(top)))
    cells = {}
    for idx, entry in enumerate(entries):
        offset, lhs, rhs = entry
        lhs, rhs = tuple(lhs), tuple(rhs)
        if not presentation.has_relation(lhs, rhs):
            raise UnknownRelation(f"cell {idx}: {lhs!r} -> {rhs!r}")
        if not isinstance(offset, int) or offset < 0 or offset + len(lhs) > len(frontier):
            raise AttachMismatch(f"cell {idx}: offset {offset} out of range for frontier of length {len(frontier)}")
        t = frontier[offset:offset + len(lhs)]
        if tuple(labels[e] for e in t) != lhs:
            raise AttachMismatch(f"cell {idx}: frontier does not read {lhs!r} at offset {offset}")
        start = len(labels)
        labels.extend(rhs)
        b = list(range(start, start + len(rhs)))
        frontier[offset:offset + len(lhs)] = b
        cells[idx] = [lhs, rhs, list(t), b]
    return list(range(len(top))), cells, labels


def _canonicalize(top_edges, cells):
    """Emit ``cells`` in canonical order.

    Returns ``(entries, order, frontier, generation)`` where ``order[c]`` is
    the key of the cell placed at canonical position ``c``.
    """
    producer = {}
    for key, c in cells.items():
        for e in c[3]:
            producer[e] = key
    succ = {key: [] for key in cells}
    indeg = {}
    for key, c in cells.items():
        ps = {producer[e] for e in c[2] if e in producer}
        indeg[key] = len(ps)
        for p in ps:
            succ[p].append(key)
    gen = {key: 1 for key, d in indeg.items() if d == 0}
    ready = list(gen)
    while ready:
        k = ready.pop()
        for s in succ[k]:
            if gen.get(s, 0) < gen[k] + 1:
                gen[s] = gen[k] + 1
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
    if any(indeg.values()):
        raise InvariantViolation("cycle in cell structure")
    by_gen = {}
    for key, g in gen.items():
        by_gen.setdefault(g, []).append(key)
    frontier = list(top_edges)
    entries, order, generation = [], [], []
    for g in sorted(by_gen):
        index = {e: i for i, e in enumerate(frontier)}
        batch = by_gen[g]
        try:
            batch.sort(key=lambda k: index[cells[k][2][0]])
        except KeyError:
            raise InvariantViolation("cell not attachable to the frontier") from None
        new_frontier, prev, shift = [], 0, 0
        for k in batch:
            lhs, rhs, t, b = cells[k]
            i = index[t[0]]
            if frontier[i:i + len(t)] != list(t) or i < prev:
                raise InvariantViolation("cells of one generation overlap or are not contiguous")
            new_frontier.extend(frontier[prev:i])
            new_frontier.extend(b)
            prev = i + len(t)
            entries.append(Entry(i + shift, lhs, rhs))
            shift += len(rhs) - len(lhs)
            order.append(k)
            generation.append(g)
        new_frontier.extend(frontier[prev:])
        frontier = new_frontier
    return tuple(entries), order, frontier, generation


class Diagram:
    """An immutable diagram over a presentation, in canonical form.

    Use :func:`degenerate`, :func:`from_cells` and the operations below to
    build diagrams; the constructor trusts its arguments.
    """

    __slots__ = ("presentation", "top", "cells", "_hash", "_layout")

    def __init__(self, presentation, top, cells):
        self.presentation = presentation
        self.top = top
        self.cells = cells
        self._hash = hash((top, cells))
        self._layout = None

    @property
    def layout(self):
        if self._layout is None:
            self._layout = _Layout(self.top, self.cells)
        return self._layout

    @property
    def bot(self):
        lay = self.layout
        return tuple(lay.labels[e] for e in lay.bottom)

    def __len__(self):
        return len(self.cells)

    @property
    def is_spherical(self):
        return self.top == self.bot

    @property
    def is_reduced(self):
        return not dipoles(self)

    def sort_key(self):
        return (len(self.cells), self.top, self.cells)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Diagram):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.top == other.top
            and self.cells == other.cells
            and self.presentation == other.presentation
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        top = "".join(self.top) if all(len(a) == 1 for a in self.top) else " ".join(self.top)
        body = ", ".join(
            f"({e.offset}, {''.join(e.lhs)}->{''.join(e.rhs)})" for e in self.cells
        )
        return f"Diagram({top}: [{body}])"

    def to_json(self):
        return {
            "presentation": self.presentation.to_json(),
            "top": list(self.top),
            "cells": [
                {"offset": e.offset, "lhs": list(e.lhs), "rhs": list(e.rhs)} for e in self.cells
            ],
        }

    @classmethod
    def from_json(cls, obj):
        if "presentation" in obj:
            pres = Presentation.from_json(obj["presentation"])
        else:
            pres = Presentation.thompson()
        cells = [(c["offset"], c["lhs"], c["rhs"]) for c in obj.get("cells", [])]
        return from_cells(pres, obj["top"], cells)


def _from_struct(presentation, top, top_edges, cells):
    entries, _, _, _ = _canonicalize(top_edges, cells)
    return Diagram(presentation, top, entries)


def from_cells(presentation, top, entries):
    """Build a diagram from any valid attachment sequence (re-canonicalized)."""
    top = presentation.check_word(top)
    top_edges, cells, _ = _replay(presentation, top, entries)
    return _from_struct(presentation, top, top_edges, cells)


def from_cells_tracked(presentation, top, entries):
    """Like :func:`from_cells` but also return ``order``: canonical index -> entry index."""
    top = presentation.check_word(top)
    top_edges, cells, _ = _replay(presentation, top, entries)
    canon, order, _, _ = _canonicalize(top_edges, cells)
    return Diagram(presentation, top, canon), order


def degenerate(word, presentation=None):
    """The 0-cell diagram whose top and bottom both read ``word``."""
    if presentation is None:
        presentation = Presentation.thompson()
    word = presentation.check_word(word)
    return Diagram(presentation, word, ())


def atomic(word, offset, lhs, rhs, presentation=None):
    return attach(degenerate(word, presentation), offset, (lhs, rhs))


def attach(d, offset, rel):
    """Attach one cell ``rel = (lhs, rhs)`` below ``d`` at ``offset``; no reduction."""
    lhs, rhs = (tuple(w) for w in rel)
    return from_cells(d.presentation, d.top, d.cells + (Entry(offset, lhs, rhs),))


def thin(word, placements, presentation=None):
    """Thin diagram from cells placed on disjoint segments of ``word``.

    ``placements`` holds ``(position, lhs, rhs)`` with positions measured on
    ``word`` itself.
    """
    base = degenerate(word, presentation)
    entries, shift, last = [], 0, 0
    for pos, lhs, rhs in sorted((p, tuple(l), tuple(r)) for p, l, r in placements):
        if pos < last:
            raise AttachMismatch("thin placements overlap")
        entries.append((pos + shift, lhs, rhs))
        shift += len(rhs) - len(lhs)
        last = pos + len(lhs)
    return from_cells(base.presentation, base.top, entries)


def inverse(d):
    """Mirror image of ``d`` in a horizontal line."""
    if not d.cells:
        return d
    lay = d.layout
    cells = {
        i: [e.rhs, e.lhs, list(lay.bots[i]), list(lay.tops[i])] for i, e in enumerate(d.cells)
    }
    return _from_struct(d.presentation, d.bot, list(lay.bottom), cells)


def concat(u, v):
    """``u`` stacked on ``v`` without cancellation."""
    if u.bot != v.top:
        raise ConcatMismatch(f"bot(u)={''.join(u.bot)} but top(v)={''.join(v.top)}")
    if not v.cells:
        return u
    if not u.cells:
        return v
    return from_cells(u.presentation, u.top, u.cells + v.cells)


def _struct(d):
    lay = d.layout
    cells = {i: [e.lhs, e.rhs, list(lay.tops[i]), list(lay.bots[i])] for i, e in enumerate(d.cells)}
    producer = dict(lay.producer)
    consumer = dict(lay.consumer)
    return cells, producer, consumer


def _dipole_below(cells, consumer, a):
    ca = cells[a]
    bots = ca[3]
    b = consumer.get(bots[0])
    if b is None:
        return None
    cb = cells[b]
    if cb[2] == bots and cb[1] == ca[0]:
        return b
    return None


def _cancel_pair(cells, producer, consumer, a, b):
    """Remove dipole ``a`` (upper) / ``b`` (lower); return cells touching the seam."""
    ca, cb = cells.pop(a), cells.pop(b)
    for e in ca[3]:
        consumer.pop(e, None)
        producer.pop(e, None)
    touched = []
    for ea, eb in zip(ca[2], cb[3]):
        producer.pop(eb, None)
        d = consumer.pop(eb, None)
        if d is not None:
            tops = cells[d][2]
            tops[tops.index(eb)] = ea
            consumer[ea] = d
        else:
            consumer.pop(ea, None)
        p = producer.get(ea)
        if p is not None:
            touched.append(p)
    return touched


def dipoles(d):
    """All cancellable pairs ``(upper, lower)`` as canonical cell indices."""
    lay = d.layout
    out = []
    for a, e in enumerate(d.cells):
        bots = lay.bots[a]
        b = lay.consumer.get(bots[0])
        if b is not None and lay.tops[b] == bots and d.cells[b].rhs == e.lhs:
            out.append((a, b))
    return out


def cancel(d, upper, lower):
    """Cancel one dipole of ``d`` (indices as returned by :func:`dipoles`)."""
    if (upper, lower) not in dipoles(d):
        raise InvariantViolation(f"cells {upper},{lower} do not form a dipole")
    cells, producer, consumer = _struct(d)
    _cancel_pair(cells, producer, consumer, upper, lower)
    return _from_struct(d.presentation, d.top, list(range(len(d.top))), cells)


def reduce(d):
    """Cancel dipoles until none remain.

    The result does not depend on the cancellation order; the search below
    revisits only cells adjacent to the seam of the previous cancellation.
    """
    if len(d.cells) < 2:
        return d
    cells, producer, consumer = _struct(d)
    stack = sorted(cells, reverse=True)
    changed = False
    while stack:
        a = stack.pop()
        if a not in cells:
            continue
        b = _dipole_below(cells, consumer, a)
        if b is None:
            continue
        stack.extend(_cancel_pair(cells, producer, consumer, a, b))
        changed = True
    if not changed:
        return d
    return _from_struct(d.presentation, d.top, list(range(len(d.top))), cells)


def compose(u, v):
    """Reduced product ``uv``."""
    return reduce(concat(u, v))


def equals(a, b):
    return a == b
