"""Isomorphism of finite lattices via a canonical form of the cover graph.

Elements are first coloured by (height, up-degree, down-degree) and the
colouring is refined until stable.  Ties are then broken by backtracking:
every way of individualising an element of the first non-singleton cell is
tried and the lexicographically least relabelled edge list is kept.
"""

from __future__ import annotations

from .lattice import Lattice


def _refine(L: Lattice, colour: list[int]) -> list[int]:
    while True:
        sig = [
            (colour[x],
             tuple(sorted(colour[u] for u in L.upper[x])),
             tuple(sorted(colour[d] for d in L.lower[x])))
            for x in range(L.n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colour)):
            return new
        colour = new


def _encode(L: Lattice, colour: list[int]) -> tuple:
    return tuple(sorted((colour[a], colour[b]) for a, b in L.covers))


def canonical_form(L: Lattice) -> tuple:
    """A tuple that is equal for two lattices iff they are isomorphic."""
    start = [0] * L.n
    for x in range(L.n):
        start[x] = L.height[x] * 10_000 + len(L.upper[x]) * 100 + len(L.lower[x])
    best = None

    def search(colour):
        nonlocal best
        colour = _refine(L, colour)
        if len(set(colour)) == L.n:
            code = _encode(L, colour)
            if best is None or code < best:
                best = code
            return
        counts: dict[int, int] = {}
        for c in colour:
            counts[c] = counts.get(c, 0) + 1
        cell = min(c for c, k in counts.items() if k > 1)
        for x in range(L.n):
            if colour[x] == cell:
                # split x off below the rest of its cell
                search([2 * c + (0 if y == x else 1) if c == cell else 2 * c
                        for y, c in enumerate(colour)])

    search(start)
    return (L.n, best)


def is_isomorphic(A: Lattice, B: Lattice) -> bool:
    if A.n != B.n or len(A.covers) != len(B.covers):
        return False
    if sorted(A.height) != sorted(B.height):
        return False
    return canonical_form(A) == canonical_form(B)
