"""Fork insertion L[S] and the extension of congruences of L to L[S].

Element ids of L are kept in L[S]; the new elements are appended in the
order z_l1 .. z_l(n_l), z_r1 .. z_r(n_r), m.  So ``embed`` is the identity
map, but it is carried explicitly so callers never rely on that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

from .congruence import (
    Congruence,
    Partition,
    generated_in_extension,
    is_congruence,
    principal_congruence,
    restrict,
)
from .errors import NotCoveringSquare, NotSPS, PreconditionViolated
from .lattice import Lattice, PrimeInterval, build
from .structure import (
    CoveringSquare,
    covering_squares,
    is_semimodular,
    is_slim,
    left_wing,
    right_wing,
)


@dataclass(frozen=True)
class ForkContext:
    """Bookkeeping for one fork insertion.

    Wings are lists of ``(y, x)`` pairs in L ids, index 0 holding
    ``(o, a_l)`` (resp. ``(o, a_r)``).  ``z_left[i]`` sits between the
    pair ``left_wing[i]``.
    """

    base: Lattice
    lattice: Lattice
    square: CoveringSquare
    left_wing: tuple[tuple[int, int], ...]
    right_wing: tuple[tuple[int, int], ...]
    z_left: tuple[int, ...]
    z_right: tuple[int, ...]
    m: int
    embed: tuple[int, ...]

    @property
    def n_l(self) -> int:
        return len(self.left_wing)

    @property
    def n_r(self) -> int:
        return len(self.right_wing)

    @property
    def b_l(self) -> int:
        return self.z_left[0]

    @property
    def b_r(self) -> int:
        return self.z_right[0]

    @property
    def fork_set(self) -> frozenset[int]:
        return frozenset((self.m,) + self.z_left + self.z_right)

    def lifted(self, x: int) -> int:
        return self.embed[x]

    def s7(self) -> tuple[int, ...]:
        """``(o, b_l, b_r, a_l, a_r, m, t)`` as ids of L[S]."""
        o, al, ar, t, _ = self.square
        e = self.embed
        return (e[o], self.b_l, self.b_r, e[al], e[ar], self.m, e[t])

    def generator_primes(self) -> list[PrimeInterval]:
        """The intervals [z, x] along both wings together with [m, t]."""
        e = self.embed
        out = [PrimeInterval(z, e[x]) for z, (_, x) in zip(self.z_left, self.left_wing)]
        out.append(PrimeInterval(self.m, e[self.square.t]))
        out += [PrimeInterval(z, e[x]) for z, (_, x) in zip(self.z_right, self.right_wing)]
        return out

    def describe(self) -> str:
        o, al, ar, t, kind = self.square
        lines = [f"square {o},{al},{ar},{t} ({kind})",
                 f"size {self.base.n} -> {self.lattice.n}",
                 f"m {self.m}"]
        for name, wing, zs in (("left", self.left_wing, self.z_left),
                               ("right", self.right_wing, self.z_right)):
            for i, ((y, x), z) in enumerate(zip(wing, zs), 1):
                lines.append(f"{name} {i}: {y} < z={z} < {x}")
        return "\n".join(lines)


def insert_fork(L: Lattice, S) -> tuple[Lattice, ForkContext]:
    """Insert a fork into the covering square ``S`` of the SPS lattice ``L``."""
    S = _as_square(L, S)
    o, al, ar, t, _ = S
    lw = [tuple(p) for p in left_wing(L, PrimeInterval(o, al))]
    rw = [tuple(p) for p in right_wing(L, PrimeInterval(o, ar))]
    for wing in (lw, rw):
        for (y1, x1), (y2, x2) in zip(wing, wing[1:]):
            if not (L.is_cover(x2, x1) and L.is_cover(y2, y1)):
                raise NotSPS("a wing does not span a product of two chains")
    n = L.n
    zl = [n + i for i in range(len(lw))]
    zr = [n + len(lw) + i for i in range(len(rw))]
    m = n + len(lw) + len(rw)

    covers = set(L.covers)
    up = {x: list(L.upper[x]) for x in range(n)}
    down = {x: list(L.lower[x]) for x in range(n)}
    for wing, zs, left in ((lw, zl, True), (rw, zr, False)):
        for (y, x), z in zip(wing, zs):
            covers.discard((y, x))
            covers |= {(y, z), (z, x)}
            up[y][up[y].index(x)] = z
            down[x][down[x].index(y)] = z
            up[z] = [x]
            down[z] = [y]
        for i in range(len(wing) - 1):
            hi, lo = zs[i], zs[i + 1]
            y_hi, x_lo = wing[i][0], wing[i + 1][1]
            covers.add((lo, hi))
            if left:
                down[hi] = [lo, y_hi]
                up[lo] = [x_lo, hi]
            else:
                down[hi] = [y_hi, lo]
                up[lo] = [hi, x_lo]
    covers |= {(zl[0], m), (zr[0], m), (m, t)}
    up[zl[0]] = [al, m]
    up[zr[0]] = [m, ar]
    down[m] = [zl[0], zr[0]]
    up[m] = [t]
    seq = down[t]
    i = seq.index(al)
    if i + 1 >= len(seq) or seq[i + 1] != ar:
        raise NotSPS("the sides of the square are not adjacent below its top")
    seq.insert(i + 1, m)

    K = build(covers, lower_order=down, upper_order=up, n=m + 1)
    if not (is_semimodular(K) and is_slim(K)):
        raise NotSPS("fork insertion did not produce a slim semimodular lattice")
    ctx = ForkContext(L, K, S, tuple(lw), tuple(rw), tuple(zl), tuple(zr), m, tuple(range(n)))
    return K, ctx


def _as_square(L: Lattice, S) -> CoveringSquare:
    key = tuple(S)[:4]
    for sq in covering_squares(L):
        if sq.elements == key:
            return sq
    raise NotCoveringSquare(f"{','.join(map(str, key))} is not a covering square")


def wing_size(L: Lattice, S) -> int:
    """Number of elements a fork at ``S`` adds."""
    o, al, ar = S[0], S[1], S[2]
    return len(left_wing(L, PrimeInterval(o, al))) + len(right_wing(L, PrimeInterval(o, ar))) + 1


def in_L_covers(ctx: ForkContext, x: int) -> tuple[int, int]:
    """``(x_plus, x_minus)``: an upper and a lower bound of ``x`` inside L.

    Elements of L are their own bounds; a new element is bounded by the ends
    of the interval of L it was inserted into.
    """
    e = ctx.embed
    if x == ctx.m:
        return e[ctx.square.t], e[ctx.square.o]
    for wing, zs in ((ctx.left_wing, ctx.z_left), (ctx.right_wing, ctx.z_right)):
        if x in zs:
            y, top = wing[zs.index(x)]
            return e[top], e[y]
    return x, x


class NamedCongruences(NamedTuple):
    alpha_l: Congruence
    alpha_r: Congruence
    alpha_bar_l: Congruence
    alpha_bar_r: Congruence
    gamma: Congruence


def named_congruences(ctx: ForkContext) -> NamedCongruences:
    L, K = ctx.base, ctx.lattice
    o, al, ar, t, _ = ctx.square
    e = ctx.embed
    return NamedCongruences(
        principal_congruence(L, al, t),
        principal_congruence(L, ar, t),
        principal_congruence(K, e[al], e[t]),
        principal_congruence(K, e[ar], e[t]),
        principal_congruence(K, ctx.m, e[t]),
    )


# extending congruences -------------------------------------------------------

def _square_restriction(alpha: Partition, ctx: ForkContext) -> Partition:
    return restrict(alpha, list(ctx.square.elements), ctx.base)


def _class_bounds(L: Lattice, block) -> tuple[int, int]:
    return reduce(lambda a, b: L.meet[a][b], block), reduce(lambda a, b: L.join[a][b], block)


def _verify_extension(alpha: Partition, P: Partition, ctx: ForkContext, what: str) -> Congruence:
    K = ctx.lattice
    if not is_congruence(K, P):
        raise AssertionError(f"{what}: constructed partition is not a congruence")
    if restrict(P, ctx.embed) != Partition(alpha.labels):
        raise AssertionError(f"{what}: constructed partition does not restrict to alpha")
    bar, _ = generated_in_extension(alpha, K, ctx.embed)
    if bar != P:
        raise AssertionError(f"{what}: constructed partition differs from the minimal extension")
    return Congruence(K, P.labels, check=False)


def extend_one(alpha: Partition, ctx: ForkContext, *, verify: bool = True) -> Congruence:
    """Extension of a congruence collapsing the whole square.

    Each class [u, v] of alpha becomes the interval [u, v] of L[S].
    """
    if not _square_restriction(alpha, ctx).is_total():
        raise PreconditionViolated("alpha does not collapse the square")
    L, K, e = ctx.base, ctx.lattice, ctx.embed
    labels = [-1] * K.n
    for block in alpha.blocks:
        u, v = _class_bounds(L, block)
        for x in K.interval(e[u], e[v]):
            if labels[x] != -1:
                raise AssertionError("extended classes overlap")
            labels[x] = e[u]
    if -1 in labels:
        raise AssertionError("extended classes do not cover L[S]")
    P = Partition(labels)
    if verify:
        return _verify_extension(alpha, P, ctx, "extend_one")
    return Congruence(K, P.labels, check=False)


def zero_blocks(alpha: Partition, wing, zs) -> list[list[int]]:
    """Blocks of new elements along one wing for a square-separating alpha.

    Wing positions i and j end up together when alpha collapses their upper
    ends; since x at a larger index lies lower, each block is the run of z
    between the least and the greatest index related to i.
    """
    out, seen = [], set()
    for i in range(len(wing)):
        if i in seen:
            continue
        related = [j for j in range(len(wing)) if alpha.same(wing[i][1], wing[j][1])]
        lo, hi = min(related), max(related)
        block = list(range(lo, hi + 1))
        seen.update(block)
        out.append([zs[j] for j in block])
    return out


def extend_zero(alpha: Partition, ctx: ForkContext, *, verify: bool = True) -> Congruence:
    """Extension of a congruence separating the four elements of the square."""
    if not _square_restriction(alpha, ctx).is_identity():
        raise PreconditionViolated("alpha collapses part of the square")
    L, K, e = ctx.base, ctx.lattice, ctx.embed
    labels = [-1] * K.n

    def place(block):
        rep = min(block)
        for x in block:
            if labels[x] != -1:
                raise AssertionError("zero-extension blocks overlap")
            labels[x] = rep

    for block in alpha.blocks:
        if len(block) > 1:
            u, v = _class_bounds(L, block)
            place(sorted(K.interval(e[u], e[v])))
    for x in range(L.n):
        if labels[e[x]] == -1:
            place([e[x]])
    place([ctx.m])
    for wing, zs in ((ctx.left_wing, ctx.z_left), (ctx.right_wing, ctx.z_right)):
        for block in zero_blocks(alpha, wing, zs):
            place(block)
    if -1 in labels:
        raise AssertionError("zero-extension blocks do not cover L[S]")
    P = Partition(labels)
    if verify:
        return _verify_extension(alpha, P, ctx, "extend_zero")
    return Congruence(K, P.labels, check=False)


def extends(alpha: Partition, ctx: ForkContext) -> tuple[bool, Congruence | None]:
    """Whether alpha has an extension to L[S], with the least one as witness.

    A congruence has an extension iff its minimal extension restricts back
    to it, so no search is needed.
    """
    r = _square_restriction(alpha, ctx)
    if r.is_total():
        return True, extend_one(alpha, ctx)
    if r.is_identity():
        return True, extend_zero(alpha, ctx)
    bar, ok = generated_in_extension(alpha, ctx.lattice, ctx.embed)
    return ok, (bar if ok else None)
