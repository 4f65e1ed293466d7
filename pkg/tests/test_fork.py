import pytest

from oracles import Ref, naive_closure
from spsfork.congruence import (
    Partition,
    all_congruences,
    generated_in_extension,
    identity,
    is_congruence,
    principal_congruence,
    restrict,
    total,
)
from spsfork.errors import NotCoveringSquare, PreconditionViolated
from spsfork.fork import (
    extend_one,
    extend_zero,
    extends,
    in_L_covers,
    insert_fork,
    named_congruences,
    wing_size,
    zero_blocks,
)
from spsfork.generators import grid, named
from spsfork.iso import is_isomorphic
from spsfork.structure import covering_squares, is_semimodular, is_slim


@pytest.fixture
def s7_fork(c2sq):
    return insert_fork(c2sq, covering_squares(c2sq)[0])


@pytest.fixture
def grid_fork():
    return insert_fork(grid(3, 3), (4, 7, 5, 8))


def test_fork_of_boolean_square_is_s7(s7_fork, s7):
    K, ctx = s7_fork
    assert K.n == 7 and len(K.covers) == 9
    assert is_isomorphic(K, s7)
    assert (ctx.z_left, ctx.z_right, ctx.m) == ((4,), (5,), 6)
    assert ctx.s7() == (0, 4, 5, 2, 1, 6, 3)
    assert K.lower[3] == (2, 6, 1)


def test_fork_of_grid_top_square(grid_fork):
    K, ctx = grid_fork
    assert K.n == 9 + 2 + 2 + 1 == 14
    assert ctx.left_wing == ((4, 7), (3, 6)) and ctx.right_wing == ((4, 5), (1, 2))
    assert is_semimodular(K) and is_slim(K)
    assert wing_size(grid(3, 3), (4, 7, 5, 8)) == 5


def test_fork_context_invariants(grid_fork):
    K, ctx = grid_fork
    for wing, zs in ((ctx.left_wing, ctx.z_left), (ctx.right_wing, ctx.z_right)):
        for (y, x), z in zip(wing, zs):
            assert K.is_cover(y, z) and K.is_cover(z, x)
        for hi, lo in zip(zs, zs[1:]):
            assert K.is_cover(lo, hi)
    o, bl, br, al, ar, m, t = ctx.s7()
    assert K.join[bl][br] == m and K.is_sublattice([o, bl, br, al, ar, m, t])
    assert ctx.fork_set == {9, 10, 11, 12, 13}


def test_bad_square_is_rejected(c2sq):
    with pytest.raises(NotCoveringSquare):
        insert_fork(c2sq, (0, 1, 2, 3))


def test_in_L_covers(s7_fork, grid_fork):
    _, ctx = s7_fork
    assert in_L_covers(ctx, ctx.m) == (3, 0)
    assert in_L_covers(ctx, 2) == (2, 2)
    _, gctx = grid_fork
    assert in_L_covers(gctx, gctx.z_left[1]) == (6, 3)


def test_named_congruences_on_s7(s7_fork):
    _, ctx = s7_fork
    named_ = named_congruences(ctx)
    # con_L(a_l, t) collapses {a_l, t} and {o, a_r}
    assert named_.alpha_l.blocks == [[0, 1], [2, 3]]
    assert named_.gamma.blocks == [[0], [1, 5], [2, 4], [3, 6]]
    assert named_.gamma < named_.alpha_bar_l and named_.gamma < named_.alpha_bar_r


def test_extend_one(s7_fork):
    _, ctx = s7_fork
    full = extend_one(total(ctx.base), ctx)
    assert full.is_total()
    with pytest.raises(PreconditionViolated):
        extend_one(identity(ctx.base), ctx)


def test_extend_one_inside_a_class(grid_fork):
    # a congruence of C3 x C3 collapsing the top square inside one class
    K, ctx = grid_fork
    L = ctx.base
    alpha = principal_congruence(L, 4, 8)
    bar = extend_one(alpha, ctx)
    assert restrict(bar, ctx.embed) == Partition(alpha.labels)
    assert bar.labels == naive_closure(Ref.of(K), [(4, 8)])


def test_extend_zero(s7_fork, grid_fork):
    _, ctx = s7_fork
    assert extend_zero(identity(ctx.base), ctx).is_identity()
    with pytest.raises(PreconditionViolated):
        extend_zero(total(ctx.base), ctx)
    K, gctx = grid_fork
    # collapses x_l1 = 7 with x_l2 = 6 but separates the square
    alpha = principal_congruence(gctx.base, 6, 7)
    assert restrict(alpha, list(gctx.square.elements)).is_identity()
    beta = extend_zero(alpha, gctx)
    assert beta.same(gctx.z_left[0], gctx.z_left[1])
    assert is_congruence(K, beta)


def test_zero_blocks_are_index_runs():
    alpha = Partition.from_blocks([[10, 30]], 40)
    wing = [(0, 10), (1, 20), (2, 30)]
    assert zero_blocks(alpha, wing, [100, 101, 102]) == [[100, 101, 102]]
    assert zero_blocks(Partition.identity(40), wing, [100, 101, 102]) == [[100], [101], [102]]


def test_every_congruence_of_the_boolean_square_extends(s7_fork):
    _, ctx = s7_fork
    for alpha in all_congruences(ctx.base):
        ok, witness = extends(alpha, ctx)
        assert ok and restrict(witness, ctx.embed) == Partition(alpha.labels)


def test_identity_extends(grid_fork):
    _, ctx = grid_fork
    assert extends(identity(ctx.base), ctx)[0]


def test_some_congruence_fails_to_extend(corpus):
    found = None
    for inst in corpus[:40]:
        for S in inst.squares():
            ctx = inst.fork(S)
            for alpha in all_congruences(inst.lattice, inst.order):
                r = restrict(alpha, list(S.elements))
                if r.is_total() or r.is_identity():
                    continue
                ok, _ = extends(alpha, ctx)
                if not ok:
                    found = (alpha, ctx)
                    break
            if found:
                break
        if found:
            break
    assert found is not None
    alpha, ctx = found
    bar, ok = generated_in_extension(alpha, ctx.lattice, ctx.embed)
    assert not ok and restrict(bar, ctx.embed) > Partition(alpha.labels)
