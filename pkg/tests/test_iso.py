import random

import networkx as nx

from spsfork.fork import insert_fork
from spsfork.generators import grid, named
from spsfork.iso import canonical_form, is_isomorphic
from spsfork.lattice import build
from spsfork.structure import covering_squares


def relabel(L, perm):
    covers = [(perm[a], perm[b]) for a, b in L.covers]
    up = {perm[x]: [perm[u] for u in L.upper[x]] for x in range(L.n)}
    down = {perm[x]: [perm[d] for d in L.lower[x]] for x in range(L.n)}
    return build(covers, lower_order=down, upper_order=up, n=L.n)


def test_relabelled_copies_are_isomorphic():
    rng = random.Random(3)
    for L in (named("s7"), grid(3, 3), grid(2, 4)):
        perm = list(range(L.n))
        rng.shuffle(perm)
        M = relabel(L, perm)
        assert is_isomorphic(L, M)
        assert canonical_form(L) == canonical_form(M)


def cover_digraph(L):
    g = nx.DiGraph()
    g.add_nodes_from(range(L.n))
    g.add_edges_from(L.covers)
    return g


def test_distinct_lattices_are_not_isomorphic():
    assert not is_isomorphic(named("m3"), named("n5"))
    assert not is_isomorphic(grid(2, 3), named("s7"))


def test_agrees_with_digraph_isomorphism_on_fork_products():
    # all single forks of two grids: many equal-size pairs, some isomorphic
    forks = []
    for base in (grid(3, 3), grid(2, 4), grid(3, 4)):
        for S in covering_squares(base):
            forks.append(insert_fork(base, S)[0])
    same = different = 0
    for i, A in enumerate(forks):
        for B in forks[i + 1:]:
            if A.n != B.n:
                continue
            expected = nx.is_isomorphic(cover_digraph(A), cover_digraph(B))
            assert is_isomorphic(A, B) == expected
            same += expected
            different += not expected
    assert same > 0 and different > 0


def test_transposed_grid_is_isomorphic():
    assert is_isomorphic(grid(2, 4), grid(4, 2))
