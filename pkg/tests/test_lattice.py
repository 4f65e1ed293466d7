import numpy as np
import pytest

from oracles import Ref
from spsfork.errors import BadOrder, MultipleExtremes, NotALattice, NotReduced
from spsfork.generators import grid, named
from spsfork.lattice import PrimeInterval, build, chain_lattice


def test_single_element_lattice():
    L = build([], n=1)
    assert L.n == 1 and L.bottom == L.top == 0
    assert L.meet[0][0] == L.join[0][0] == 0


def test_boolean_square_tables_are_componentwise():
    L = grid(2, 2)
    # id = i*2 + j for (i, j)
    coords = {i * 2 + j: (i, j) for i in range(2) for j in range(2)}
    back = {v: k for k, v in coords.items()}
    for a in range(4):
        for b in range(4):
            (ia, ja), (ib, jb) = coords[a], coords[b]
            assert L.meet[a][b] == back[(min(ia, ib), min(ja, jb))]
            assert L.join[a][b] == back[(max(ia, ib), max(ja, jb))]


def test_s7_from_its_cover_set(s7, s7_ids):
    assert s7.n == 7 and len(s7.covers) == 9
    assert s7.bottom == s7_ids["o"] and s7.top == s7_ids["t"]
    assert s7.lower[s7_ids["t"]] == (s7_ids["a_l"], s7_ids["m"], s7_ids["a_r"])


def test_tables_agree_with_reference(s7):
    ref = Ref.of(s7)
    assert [list(r) for r in s7.meet] == ref.meet
    assert [list(r) for r in s7.join] == ref.join
    meet, join, leq, cov = s7.tables()
    assert np.array_equal(leq, np.array(ref.leq))
    assert cov.sum() == 9


def test_transitive_edge_is_rejected():
    with pytest.raises(NotReduced):
        build([(0, 1), (1, 2), (0, 2)], lower_order={2: [1, 0]}, upper_order={0: [1, 2]})


def test_missing_meet_is_rejected():
    # two incomparable minimal-ish elements under a common top and bottom with a bowtie
    covers = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 5), (4, 5)]
    with pytest.raises(NotALattice):
        build(covers, require_embedding=False)


def test_two_tops_are_rejected():
    with pytest.raises(MultipleExtremes):
        build([(0, 1), (0, 2)], upper_order={0: [1, 2]})


def test_order_lists_must_match_neighbourhoods():
    with pytest.raises(BadOrder):
        build([(0, 1), (0, 2), (1, 3), (2, 3)], upper_order={0: [1, 3]}, lower_order={3: [1, 2]})
    with pytest.raises(BadOrder):
        build([(0, 1), (0, 2), (1, 3), (2, 3)], lower_order={3: [1, 2]})


def test_ideal_filter_interval(s7, s7_ids):
    i = s7_ids
    assert s7.ideal(s7.top) == frozenset(range(7))
    assert s7.ideal(s7.bottom) == {s7.bottom}
    assert s7.ideal(i["m"]) == {i["o"], i["b_l"], i["b_r"], i["m"]}
    assert s7.filter(i["b_l"]) == {i["b_l"], i["a_l"], i["m"], i["t"]}
    assert s7.interval(i["b_r"], i["t"]) == {i["b_r"], i["m"], i["a_r"], i["t"]}


def test_primes_are_the_covers(s7):
    assert len(s7.primes()) == 9
    assert all(isinstance(p, PrimeInterval) and s7.is_cover(*p) for p in s7.primes())


def test_sublattice_relabels_densely(s7, s7_ids):
    i = s7_ids
    square = [i["o"], i["a_l"], i["a_r"], i["t"]]
    assert s7.is_sublattice(square)
    sub, ids = s7.sublattice(square)
    assert ids == sorted(square) and sub.n == 4 and len(sub.covers) == 4
    assert not s7.is_sublattice([i["a_l"], i["a_r"]])


def test_chain_lattice():
    C = chain_lattice(4)
    assert C.n == 4 and len(C.covers) == 3
    assert all(C.comparable(a, b) for a in range(4) for b in range(4))
