"""Finite lattices stored as cover graphs with a left-to-right planar embedding.

Elements are the integers ``0 .. n-1``.  The embedding is given by two
ordered lists per element: its upper covers and its lower covers, each read
from left to right in the diagram.  Everything else (order, meet, join,
heights) is derived once at construction time; a :class:`Lattice` is never
mutated afterwards.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import BadOrder, MultipleExtremes, NotALattice, NotReduced, NotSublattice


class PrimeInterval(NamedTuple):
    bottom: int
    top: int

    def __str__(self):
        return f"[{self.bottom},{self.top}]"


class Lattice:
    """An immutable finite lattice with an optional planar embedding.

    Use :func:`build` to construct one; the constructor assumes validated
    input.
    """

    __slots__ = (
        "n", "covers", "upper", "lower", "embedded", "bottom", "top",
        "meet", "join", "height", "_order", "_pos", "_down", "_up", "_np", "_subs",
        "__weakref__",
    )

    def __init__(self, n, upper, lower, order, pos, down, up, meet, join, embedded):
        self.n = n
        self.upper = upper
        self.lower = lower
        self.covers = frozenset((a, b) for a in range(n) for b in upper[a])
        self.embedded = embedded
        self._order = order
        self._pos = pos
        self._down = down
        self._up = up
        self.meet = meet
        self.join = join
        self.bottom = order[0]
        self.top = order[-1]
        height = [0] * n
        for x in order:
            for c in lower[x]:
                height[x] = max(height[x], height[c] + 1)
        self.height = tuple(height)
        self._np = None
        self._subs: dict[frozenset, bool] = {}

    def __repr__(self):
        return f"<Lattice n={self.n} covers={len(self.covers)}>"

    def __len__(self):
        return self.n

    # order queries -------------------------------------------------------

    def leq(self, a: int, b: int) -> bool:
        return bool((self._down[b] >> self._pos[a]) & 1)

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b)

    def is_cover(self, a: int, b: int) -> bool:
        return (a, b) in self.covers

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def _members(self, mask: int) -> list[int]:
        order = self._order
        out = []
        while mask:
            low = mask & -mask
            out.append(order[low.bit_length() - 1])
            mask ^= low
        return out

    def ideal(self, t: int) -> frozenset[int]:
        """The principal ideal of ``t``: every element below or equal to it."""
        return frozenset(self._members(self._down[t]))

    def filter(self, t: int) -> frozenset[int]:
        return frozenset(self._members(self._up[t]))

    def interval(self, a: int, b: int) -> frozenset[int]:
        return frozenset(self._members(self._up[a] & self._down[b]))

    def primes(self) -> list[PrimeInterval]:
        return sorted(PrimeInterval(a, b) for a, b in self.covers)

    def topological(self) -> tuple[int, ...]:
        """Elements listed so that every element precedes its upper covers."""
        return self._order

    # numpy views used by the vectorised predicates ---------------------

    def tables(self):
        """Return ``(meet, join, leq, cover)`` as numpy arrays."""
        if self._np is None:
            n = self.n
            meet = np.array(self.meet, dtype=np.int32).reshape(n, n)
            join = np.array(self.join, dtype=np.int32).reshape(n, n)
            leq = np.zeros((n, n), dtype=bool)
            for b in range(n):
                for a in self._members(self._down[b]):
                    leq[a, b] = True
            cov = np.zeros((n, n), dtype=bool)
            for a, b in self.covers:
                cov[a, b] = True
            self._np = (meet, join, leq, cov)
        return self._np

    # sublattices -------------------------------------------------------

    def is_sublattice(self, elements: Iterable[int]) -> bool:
        key = frozenset(elements)
        if key in self._subs:
            return self._subs[key]
        ids = np.fromiter(key, dtype=np.intp, count=len(key))
        if ids.size == 0:
            return False
        meet, join, _, _ = self.tables()
        inside = np.zeros(self.n, dtype=bool)
        inside[ids] = True
        block = np.ix_(ids, ids)
        ok = bool(inside[meet[block]].all() and inside[join[block]].all())
        if len(self._subs) < 4096:
            self._subs[key] = ok
        return ok

    def sublattice(self, elements: Iterable[int]) -> tuple["Lattice", list[int]]:
        """Return the sublattice on ``elements`` relabelled densely.

        The second value maps new ids to the ids of ``self``.  The result
        carries no embedding, since covers of a sublattice need not be
        covers of the host.
        """
        ids = sorted(set(elements))
        if not self.is_sublattice(ids):
            raise NotSublattice("element set is not closed under meet and join")
        new = {x: i for i, x in enumerate(ids)}
        pairs = []
        for a in ids:
            above = [b for b in ids if b != a and self.leq(a, b)]
            for b in above:
                if not any(c != b and self.leq(c, b) for c in above):
                    pairs.append((new[a], new[b]))
        return build(pairs, n=len(ids), require_embedding=False), ids


def build(
    cover_pairs: Iterable[tuple[int, int]],
    lower_order: dict[int, Sequence[int]] | None = None,
    upper_order: dict[int, Sequence[int]] | None = None,
    *,
    n: int | None = None,
    require_embedding: bool = True,
) -> Lattice:
    """Validate a cover graph plus embedding and return a :class:`Lattice`.

    ``lower_order`` / ``upper_order`` map an element to its covers listed
    left to right.  Elements with at most one cover may be omitted.  With
    ``require_embedding`` set, an element with two or more covers in some
    direction must be listed, otherwise :class:`BadOrder` is raised.
    """
    pairs = [(int(a), int(b)) for a, b in cover_pairs]
    if n is None:
        n = max((max(p) for p in pairs), default=0) + 1
    if n < 1:
        raise NotALattice("a lattice needs at least one element")
    upsets: list[set[int]] = [set() for _ in range(n)]
    downsets: list[set[int]] = [set() for _ in range(n)]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise NotALattice(f"cover ({a},{b}) uses an element outside 0..{n - 1}")
        if a == b:
            raise NotALattice(f"self-loop at {a}")
        if b in upsets[a]:
            raise NotReduced(f"duplicate cover ({a},{b})")
        upsets[a].add(b)
        downsets[b].add(a)

    lower_order = lower_order or {}
    upper_order = upper_order or {}
    embedded = True

    def arrange(given, actual, x, what):
        nonlocal embedded
        if x in given:
            seq = [int(v) for v in given[x]]
            if sorted(seq) != sorted(actual) or len(set(seq)) != len(seq):
                raise BadOrder(f"{what} order of {x} is not a permutation of its covers")
            return tuple(seq)
        if len(actual) > 1:
            if require_embedding:
                raise BadOrder(f"missing {what} order for element {x}")
            embedded = False
        return tuple(sorted(actual))

    # Kahn's algorithm; the ready queue is kept sorted for determinism
    indeg = [len(downsets[x]) for x in range(n)]
    ready = deque(sorted(x for x in range(n) if indeg[x] == 0))
    order = []
    while ready:
        x = ready.popleft()
        order.append(x)
        for y in sorted(upsets[x]):
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
    if len(order) != n:
        raise NotALattice("cover graph contains a cycle")
    minimal = [x for x in range(n) if not downsets[x]]
    maximal = [x for x in range(n) if not upsets[x]]
    if len(minimal) != 1 or len(maximal) != 1:
        raise MultipleExtremes(f"{len(minimal)} minimal and {len(maximal)} maximal elements")

    pos = [0] * n
    for i, x in enumerate(order):
        pos[x] = i
    down = [0] * n
    for x in order:
        mask = 1 << pos[x]
        for c in downsets[x]:
            mask |= down[c]
        down[x] = mask
    up = [0] * n
    for x in reversed(order):
        mask = 1 << pos[x]
        for c in upsets[x]:
            mask |= up[c]
        up[x] = mask

    for b in range(n):
        for a in downsets[b]:
            for c in downsets[b]:
                if c != a and (down[c] >> pos[a]) & 1:
                    raise NotReduced(f"cover ({a},{b}) is implied by ({a},{c},{b})")

    for x in list(lower_order) + list(upper_order):
        if not 0 <= int(x) < n:
            raise BadOrder(f"order given for unknown element {x}")
    upper = tuple(arrange(upper_order, upsets[x], x, "upper") for x in range(n))
    lower = tuple(arrange(lower_order, downsets[x], x, "lower") for x in range(n))

    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for a in range(n):
        meet[a][a] = join[a][a] = a
        for b in range(a + 1, n):
            common = down[a] & down[b]
            g = order[common.bit_length() - 1]
            if down[g] != common:
                raise NotALattice(f"elements {a} and {b} have no meet")
            meet[a][b] = meet[b][a] = g
            common = up[a] & up[b]
            low = common & -common
            h = order[low.bit_length() - 1]
            if up[h] != common:
                raise NotALattice(f"elements {a} and {b} have no join")
            join[a][b] = join[b][a] = h

    lat = Lattice(n, upper, lower, tuple(order), pos, down, up, meet, join, embedded)
    _check_axioms(lat)
    return lat


def _check_axioms(lat: Lattice) -> None:
    meet, join, _, _ = lat.tables()
    n = lat.n
    idx = np.arange(n)
    if not (np.array_equal(meet, meet.T) and np.array_equal(join, join.T)):
        raise NotALattice("meet or join is not commutative")
    if not (np.array_equal(meet[idx, idx], idx) and np.array_equal(join[idx, idx], idx)):
        raise NotALattice("meet or join is not idempotent")
    # (a ^ b) ^ c == a ^ (b ^ c), evaluated for all triples at once
    if not np.array_equal(meet[meet[:, :, None], idx[None, None, :]],
                          meet[idx[:, None, None], meet[None, :, :]]):
        raise NotALattice("meet is not associative")
    if not np.array_equal(join[join[:, :, None], idx[None, None, :]],
                          join[idx[:, None, None], join[None, :, :]]):
        raise NotALattice("join is not associative")
    if not (np.array_equal(join[idx[:, None], meet], np.broadcast_to(idx[:, None], (n, n)))
            and np.array_equal(meet[idx[:, None], join], np.broadcast_to(idx[:, None], (n, n)))):
        raise NotALattice("absorption fails")


def chain_lattice(k: int) -> Lattice:
    """The chain with ``k`` elements, ``0 < 1 < ... < k-1``."""
    return build([(i, i + 1) for i in range(k - 1)], n=k)
