"""Structural predicates and planar notions on top of :class:`Lattice`.

Slimness, semimodularity, covering squares, trajectories, wings, boundary
chains, corners, and the left/right position of elements relative to a
maximal chain.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import EmbeddingInconsistent, NotSlim
from .lattice import Lattice, PrimeInterval

TIGHT = "tight"
WIDE = "wide"


class CoveringSquare(NamedTuple):
    o: int
    a_l: int
    a_r: int
    t: int
    kind: str

    @property
    def elements(self):
        return (self.o, self.a_l, self.a_r, self.t)

    def __str__(self):
        return f"{self.o},{self.a_l},{self.a_r},{self.t}"


# predicates --------------------------------------------------------------

def is_semimodular(L: Lattice) -> bool:
    """a ^ b < a (cover) implies b < a v b (cover), for all a, b."""
    meet, join, _, cov = L.tables()
    idx = np.arange(L.n)
    lower_cover = cov[meet, idx[:, None]]          # meet(a,b) covered by a
    upper_cover = cov[idx[None, :], join]          # b covered by join(a,b)
    return bool(np.all(~lower_cover | upper_cover))


def find_m3(L: Lattice):
    """Return a triple generating an M3 sublattice, or ``None``."""
    meet, join, leq, _ = L.tables()
    inc = ~(leq | leq.T)
    for x in range(L.n):
        ys = np.flatnonzero(inc[x])
        if len(ys) < 2:
            continue
        mx = meet[x, ys]
        jx = join[x, ys]
        sub_m = meet[np.ix_(ys, ys)]
        sub_j = join[np.ix_(ys, ys)]
        ok = (inc[np.ix_(ys, ys)]
              & (mx[:, None] == mx[None, :]) & (sub_m == mx[:, None])
              & (jx[:, None] == jx[None, :]) & (sub_j == jx[:, None]))
        hit = np.argwhere(ok)
        if len(hit):
            i, j = hit[0]
            return (x, int(ys[i]), int(ys[j]))
    return None


def is_slim(L: Lattice) -> bool:
    """True iff ``L`` has no M3 sublattice."""
    return find_m3(L) is None


def join_irreducibles(L: Lattice) -> list[int]:
    return [x for x in range(L.n) if len(L.lower[x]) == 1]


def is_slim_two_chains(L: Lattice) -> bool:
    """True iff the join-irreducible elements form a union of two chains.

    By Dilworth's theorem this is the absence of a three-element antichain.
    """
    ji = join_irreducibles(L)
    for x, y, z in combinations(ji, 3):
        if not (L.comparable(x, y) or L.comparable(x, z) or L.comparable(y, z)):
            return False
    return True


def upper_cover_count_ok(L: Lattice) -> bool:
    return all(len(L.upper[x]) <= 2 for x in range(L.n))


def is_distributive(L: Lattice, elements=None) -> bool:
    """Distributive law on ``elements`` (a sublattice; default: all of L)."""
    meet, join, _, _ = L.tables()
    idx = np.arange(L.n) if elements is None else np.array(sorted(elements))
    m = meet[np.ix_(idx, idx)]
    j = join[np.ix_(idx, idx)]
    # x ^ (y v z) versus (x ^ y) v (x ^ z)
    lhs = meet[idx[:, None, None], j[None, :, :]]
    rhs = join[m[:, :, None], m[:, None, :]]
    return bool(np.array_equal(lhs, rhs))


def is_sps(L: Lattice) -> bool:
    """Slim and semimodular (planarity is carried by the stored embedding)."""
    return is_semimodular(L) and is_slim(L)


# covering squares and trajectories -----------------------------------

def covering_squares(L: Lattice) -> list[CoveringSquare]:
    out = []
    for o in range(L.n):
        ups = L.upper[o]
        for i, a in enumerate(ups):
            for b in ups[i + 1:]:
                t = L.join[a][b]
                if L.is_cover(a, t) and L.is_cover(b, t):
                    kind = TIGHT if len(L.lower[t]) == 2 else WIDE
                    out.append(CoveringSquare(o, a, b, t, kind))
    return out


def square_of(L: Lattice, o: int, a_l: int, a_r: int, t: int) -> CoveringSquare | None:
    for sq in covering_squares(L):
        if sq.elements == (o, a_l, a_r, t):
            return sq
    return None


def _consecutive(L: Lattice):
    """Map each prime interval to its right / left consecutive neighbour."""
    right: dict[PrimeInterval, PrimeInterval] = {}
    left: dict[PrimeInterval, PrimeInterval] = {}

    def link(p, q):
        if right.get(p, q) != q or left.get(q, p) != p:
            raise NotSlim(f"trajectory branches at {p} / {q}")
        right[p] = q
        left[q] = p

    for sq in covering_squares(L):
        o, al, ar, t, _ = sq
        link(PrimeInterval(o, al), PrimeInterval(ar, t))   # going up
        link(PrimeInterval(al, t), PrimeInterval(o, ar))   # going down
    return right, left


def trajectories(L: Lattice) -> list[list[PrimeInterval]]:
    """Partition the prime intervals into trajectories, each left to right."""
    right, left = _consecutive(L)
    out = []
    seen = set()
    for p in L.primes():
        if p in left:
            continue
        walk = [p]
        seen.add(p)
        while walk[-1] in right:
            q = right[walk[-1]]
            if q in seen:
                raise NotSlim("cyclic trajectory")
            walk.append(q)
            seen.add(q)
        out.append(walk)
    if len(seen) != len(L.covers):
        raise NotSlim("cyclic trajectory")
    return out


def left_wing(L: Lattice, p: PrimeInterval) -> list[PrimeInterval]:
    """``p`` followed by the intervals of its trajectory to its left."""
    _, left = _consecutive(L)
    wing = [PrimeInterval(*p)]
    while wing[-1] in left:
        wing.append(left[wing[-1]])
    return wing


def right_wing(L: Lattice, p: PrimeInterval) -> list[PrimeInterval]:
    right, _ = _consecutive(L)
    wing = [PrimeInterval(*p)]
    while wing[-1] in right:
        wing.append(right[wing[-1]])
    return wing


# boundaries and corners ------------------------------------------------

def boundary_chains(L: Lattice) -> tuple[list[int], list[int]]:
    """Left and right boundary chains, bottom to top."""
    chains = []
    for pick in (0, -1):
        x = L.bottom
        chain = [x]
        while L.upper[x]:
            x = L.upper[x][pick]
            chain.append(x)
        chains.append(chain)
    return chains[0], chains[1]


def boundary_below(L: Lattice, x: int, side: str) -> list[int]:
    """The chain from ``x`` down to 0 taking the leftmost (rightmost) lower cover."""
    pick = 0 if side == "left" else -1
    chain = []
    while L.lower[x]:
        x = L.lower[x][pick]
        chain.append(x)
    return chain


def corners(L: Lattice) -> tuple[list[int], list[int]]:
    left, right = boundary_chains(L)

    def doubly(x):
        return x not in (L.bottom, L.top) and len(L.upper[x]) == 1 and len(L.lower[x]) == 1

    return [x for x in left if doubly(x)], [x for x in right if doubly(x)]


def is_rectangular(L: Lattice) -> bool:
    lc, rc = corners(L)
    if len(lc) != 1 or len(rc) != 1:
        return False
    a, b = lc[0], rc[0]
    return L.join[a][b] == L.top and L.meet[a][b] == L.bottom and is_semimodular(L)


def is_patch(L: Lattice) -> bool:
    if not is_rectangular(L):
        return False
    lc, rc = corners(L)
    return L.is_cover(lc[0], L.top) and L.is_cover(rc[0], L.top)


# position relative to a maximal chain ---------------------------------

def chain_sides(L: Lattice, chain, within=None) -> tuple[frozenset, frozenset]:
    """Split ``within - chain`` into the elements left and right of ``chain``.

    ``chain`` is a maximal chain of the sublattice ``within`` (by default
    all of ``L``; otherwise an ideal or interval, so covers agree), listed
    in either direction.  An element is left of the chain when it is
    reachable through covers inside ``within - chain`` from a cover edge
    leaving the chain on its left side.
    """
    region = set(range(L.n)) if within is None else set(within)
    ch = sorted(chain, key=lambda x: L.height[x])
    on = set(ch)
    if len(on) != len(ch) or not on <= region:
        raise EmbeddingInconsistent("chain is not inside the region")
    seeds = {"left": set(), "right": set()}
    for i, c in enumerate(ch):
        below = ch[i - 1] if i > 0 else None
        above = ch[i + 1] if i + 1 < len(ch) else None
        ups = [u for u in L.upper[c] if u in region]
        downs = [d for d in L.lower[c] if d in region]
        for seq, anchor in ((ups, above), (downs, below)):
            if anchor is None:
                if seq:
                    raise EmbeddingInconsistent("chain is not maximal in the region")
                continue
            if anchor not in seq:
                raise EmbeddingInconsistent("consecutive chain elements are not covers")
            k = seq.index(anchor)
            seeds["left"].update(v for v in seq[:k] if v not in on)
            seeds["right"].update(v for v in seq[k + 1:] if v not in on)
    sides = {}
    for name, start in seeds.items():
        seen = set(start)
        stack = list(start)
        while stack:
            x = stack.pop()
            for y in L.upper[x] + L.lower[x]:
                if y in region and y not in on and y not in seen:
                    seen.add(y)
                    stack.append(y)
        sides[name] = frozenset(seen)
    if sides["left"] & sides["right"]:
        raise EmbeddingInconsistent("an element lies on both sides of a maximal chain")
    return sides["left"], sides["right"]


def between(L: Lattice, left_chain, right_chain, within) -> frozenset[int]:
    """Elements of ``within`` not strictly left of ``left_chain`` nor strictly
    right of ``right_chain``."""
    left_of, _ = chain_sides(L, left_chain, within)
    _, right_of = chain_sides(L, right_chain, within)
    return frozenset(set(within) - left_of - right_of)


def immediately_left(L: Lattice, top: int, x: int) -> int | None:
    """The lower cover of ``top`` just left of ``x`` in the embedding."""
    seq = L.lower[top]
    k = seq.index(x)
    return seq[k - 1] if k > 0 else None


def immediately_right(L: Lattice, top: int, x: int) -> int | None:
    seq = L.lower[top]
    k = seq.index(x)
    return seq[k + 1] if k + 1 < len(seq) else None
