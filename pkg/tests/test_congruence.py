import pytest

from oracles import Ref, all_congruence_labels, blocks, least_congruence, substitution
from spsfork.congruence import (
    CprojIndex,
    Partition,
    all_congruences,
    collapses_iff_cproj_check,
    cpersp_down,
    cpersp_up,
    cproj,
    down_sets,
    generated_in_extension,
    identity,
    is_congruence,
    is_congruence_via_covers,
    ji_congruences,
    parse_blocks,
    principal_congruence,
    restrict,
    total,
)
from spsfork.errors import NotIntervalClasses, NotSublattice, TooLarge
from spsfork.fork import insert_fork
from spsfork.generators import grid, named
from spsfork.lattice import chain_lattice
from spsfork.structure import covering_squares


def test_partition_canonical_labels():
    p = Partition([5, 5, 2, 2, 7])
    assert p.labels == (0, 0, 2, 2, 4)
    assert p.blocks == [[0, 1], [2, 3], [4]]
    assert Partition.from_blocks([[3, 1]], 4).labels == (0, 1, 2, 1)


def test_partition_order_and_join():
    a = Partition.from_blocks([[0, 1]], 4)
    b = Partition.from_blocks([[1, 2]], 4)
    j = a.join(b)
    assert j.blocks == [[0, 1, 2], [3]]
    assert a <= j and b <= j and not j <= a
    assert a.join(a) == a


def test_block_serialization_round_trip():
    p = Partition.from_blocks([[4, 6], [1, 3], [2, 5]], 7)
    text = p.serialize()
    assert text == "0\n1 3\n2 5\n4 6"
    assert parse_blocks(text, 7) == p
    with pytest.raises(ValueError):
        parse_blocks("1 9", 7)


def test_principal_congruence_on_s7(s7, s7_ids):
    i = s7_ids
    assert principal_congruence(s7, i["a_l"], i["a_l"]).is_identity()
    assert principal_congruence(s7, s7.bottom, s7.top).is_total()
    theta = principal_congruence(s7, i["m"], i["t"])
    # oracle: least congruence among the 877 partitions of 7 elements
    assert theta.blocks == [[0], [1, 3], [2, 5], [4, 6]]
    assert theta.blocks == blocks(least_congruence(Ref.of(s7), [(i["m"], i["t"])]))


def test_principal_congruence_matches_enumeration():
    for L in (named("s7"), grid(2, 3), chain_lattice(3)):
        ref = Ref.of(L)
        cons = all_congruence_labels(ref)
        for a in range(L.n):
            for b in range(a + 1, L.n):
                assert principal_congruence(L, a, b).labels == least_congruence(ref, [(a, b)], cons)


def test_substitution_checks(c2sq):
    assert is_congruence(c2sq, Partition.identity(4))
    assert is_congruence(c2sq, Partition.total(4))
    # {o, a_l} alone: joining with a_r separates a_r from t
    bad = Partition.from_blocks([[0, 2]], 4)
    assert not is_congruence(c2sq, bad)
    assert not is_congruence_via_covers(c2sq, bad)
    assert not substitution(Ref.of(c2sq), bad.labels)


def test_cover_level_test(s7):
    assert is_congruence_via_covers(s7, Partition.identity(7))
    gamma = Partition.from_blocks([[1, 3], [2, 5], [4, 6]], 7)
    assert is_congruence_via_covers(s7, gamma) and is_congruence(s7, gamma)
    with pytest.raises(NotIntervalClasses):
        is_congruence_via_covers(s7, Partition.from_blocks([[1, 6]], 7))


def test_perspectivity(c2sq, s7, s7_ids):
    o, a_r, a_l, t = 0, 1, 2, 3
    assert cproj(c2sq, (o, a_l), (o, a_l))
    assert cpersp_up(c2sq, (o, a_l), (a_r, t))
    assert cpersp_down(c2sq, (a_r, t), (o, a_l))
    i = s7_ids
    assert cproj(s7, (i["m"], i["t"]), (i["b_l"], i["a_l"]))
    assert not cproj(s7, (i["m"], i["t"]), (i["o"], i["b_l"]))


def test_collapse_against_projectivity(s7, s7_ids):
    i = s7_ids
    assert collapses_iff_cproj_check(s7, i["m"], i["t"], (i["b_r"], i["a_r"]))
    assert not collapses_iff_cproj_check(s7, i["m"], i["t"], (i["o"], i["b_l"]))
    assert collapses_iff_cproj_check(s7, i["b_l"], i["a_l"], (i["b_l"], i["a_l"]))
    assert not any(collapses_iff_cproj_check(s7, 3, 3, q) for q in s7.primes())


def test_cproj_index_agrees_with_search(s7):
    index = CprojIndex(s7)
    for p in s7.primes():
        for q in s7.primes():
            assert index.cproj(p, q) == cproj(s7, p, q)


def test_restriction(s7, s7_ids):
    i = s7_ids
    square = [i["o"], i["a_l"], i["a_r"], i["t"]]
    assert restrict(identity(s7), square).is_identity()
    assert restrict(total(s7), square).is_total()
    assert restrict(principal_congruence(s7, i["m"], i["t"]), square).is_identity()
    with pytest.raises(NotSublattice):
        restrict(identity(s7), [i["a_l"], i["a_r"]])


def test_minimal_extension_into_s7(c2sq):
    S = covering_squares(c2sq)[0]
    K, ctx = insert_fork(c2sq, S)
    alpha = principal_congruence(c2sq, 0, 2)          # con(o, a_l)
    bar, ok = generated_in_extension(alpha, K, ctx.embed)
    assert ok
    # {o, b_l, a_l} and {b_r, m, a_r, t}; b_l = 4, b_r = 5, m = 6
    assert bar.blocks == [[0, 2, 4], [1, 3, 5, 6]]
    assert bar.blocks == blocks(least_congruence(Ref.of(K), [(0, 2)]))
    assert generated_in_extension(identity(c2sq), K, ctx.embed)[0].is_identity()
    assert generated_in_extension(total(c2sq), K, ctx.embed)[0].is_total()


def test_ji_orders():
    chain = ji_congruences(chain_lattice(4))
    assert len(chain) == 3
    assert not any(chain.leq[a][b] for a in range(3) for b in range(3) if a != b)
    c2 = ji_congruences(grid(2, 2))
    assert len(c2) == 2 and not c2.leq[0][1] and not c2.leq[1][0]


def test_s7_ji_order(s7, s7_ids):
    order = ji_congruences(s7)
    assert len(order) == 3
    gamma = order.index(principal_congruence(s7, s7_ids["m"], s7_ids["t"]))
    others = [j for j in range(3) if j != gamma]
    assert all(order.leq[gamma][j] and not order.leq[j][gamma] for j in others)
    assert sorted(order.upper_covers(gamma)) == sorted(others)


def test_all_congruences_against_enumeration():
    for L in (chain_lattice(3), grid(2, 2), named("s7"), grid(2, 3)):
        ours = {c.labels for c in all_congruences(L)}
        assert ours == set(all_congruence_labels(Ref.of(L)))
    assert len(all_congruences(chain_lattice(3))) == 4
    assert len(all_congruences(named("s7"))) == len(down_sets(ji_congruences(named("s7")))) == 5


def test_all_congruences_size_guard():
    with pytest.raises(TooLarge):
        all_congruences(chain_lattice(23))
