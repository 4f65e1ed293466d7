"""Corpus construction: grids, named small lattices, random fork sequences.

Randomness comes from :class:`random.Random` seeded with the GenSpec seed,
so a spec always yields the same lattice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import NotSPS, UnknownName
from .fork import ForkContext, insert_fork, wing_size
from .lattice import Lattice, build
from .structure import TIGHT, covering_squares, is_patch, is_semimodular, is_slim


def grid(m: int, n: int) -> Lattice:
    """C_m x C_n; element (i, j) has id i*n + j and i grows to the left."""
    if m < 1 or n < 1:
        raise ValueError("grid sides must be positive")

    def eid(i, j):
        return i * n + j

    covers, up, down = [], {}, {}
    for i in range(m):
        for j in range(n):
            ups = []
            if i + 1 < m:
                ups.append(eid(i + 1, j))
            if j + 1 < n:
                ups.append(eid(i, j + 1))
            downs = []
            if j > 0:
                downs.append(eid(i, j - 1))
            if i > 0:
                downs.append(eid(i - 1, j))
            covers += [(eid(i, j), u) for u in ups]
            up[eid(i, j)] = ups
            down[eid(i, j)] = downs
    return build(covers, lower_order=down, upper_order=up, n=m * n)


_NAMED = {
    "m3": ([(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
           {4: [1, 2, 3]}, {0: [1, 2, 3]}),
    # 0 < 1 < 2 < 4 on the left, 0 < 3 < 4 on the right
    "n5": ([(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
           {4: [2, 3]}, {0: [1, 3]}),
    # o=0, b_l=1, b_r=2, a_l=3, m=4, a_r=5, t=6
    "s7": ([(0, 1), (0, 2), (1, 3), (1, 4), (2, 4), (2, 5), (3, 6), (4, 6), (5, 6)],
           {4: [1, 2], 6: [3, 4, 5]}, {0: [1, 2], 1: [3, 4], 2: [4, 5]}),
}

S7_IDS = {"o": 0, "b_l": 1, "b_r": 2, "a_l": 3, "m": 4, "a_r": 5, "t": 6}


def named(name: str) -> Lattice:
    if name == "c2sq":
        return grid(2, 2)
    if name not in _NAMED:
        raise UnknownName(name)
    covers, down, up = _NAMED[name]
    return build(covers, lower_order=down, upper_order=up)


def base_lattice(base: str) -> Lattice:
    """Parse ``grid:m,n`` or ``c2sq``."""
    if base == "c2sq":
        return grid(2, 2)
    if base.startswith("grid:"):
        try:
            m, n = (int(v) for v in base[5:].split(","))
        except ValueError:
            raise UnknownName(base) from None
        return grid(m, n)
    raise UnknownName(base)


@dataclass(frozen=True)
class GenSpec:
    seed: int
    base: str = "c2sq"
    fork_count: int = 0
    square_policy: str = "uniform"
    max_size: int | None = 60

    def __post_init__(self):
        if self.square_policy not in ("uniform", "tight"):
            raise ValueError(f"unknown square policy {self.square_policy!r}")
        if self.fork_count < 0:
            raise ValueError("fork_count must be nonnegative")


@dataclass
class Generated:
    spec: GenSpec
    lattice: Lattice
    provenance: list[ForkContext] = field(default_factory=list)

    @property
    def stages(self) -> list[Lattice]:
        """Every lattice of the construction, base first."""
        if not self.provenance:
            return [self.lattice]
        return [self.provenance[0].base] + [c.lattice for c in self.provenance]


def random_sps(spec: GenSpec, *, require_patch: bool = False) -> Generated:
    """Apply ``spec.fork_count`` random fork insertions to the base lattice.

    Squares are drawn uniformly (or among tight ones only); insertions that
    would exceed ``max_size`` are skipped, and the run stops early when no
    square is admissible.
    """
    rng = random.Random(spec.seed)
    L = base_lattice(spec.base)
    out = Generated(spec, L)
    for _ in range(spec.fork_count):
        squares = covering_squares(L)
        if spec.square_policy == "tight":
            squares = [s for s in squares if s.kind == TIGHT]
        if spec.max_size is not None:
            squares = [s for s in squares if L.n + wing_size(L, s) <= spec.max_size]
        if not squares:
            break
        S = rng.choice(squares)
        L, ctx = insert_fork(L, S)
        if not (is_semimodular(L) and is_slim(L)):
            raise NotSPS("construction prefix is not SPS")
        if require_patch and not is_patch(L):
            raise NotSPS("construction prefix is not a patch lattice")
        out.provenance.append(ctx)
        out.lattice = L
    return out


def random_patch(spec: GenSpec) -> Lattice:
    if spec.base != "c2sq":
        raise ValueError("patch lattices start from the four-element Boolean lattice")
    return random_sps(spec, require_patch=True).lattice


def corpus_spec(seed: int) -> GenSpec:
    """The default corpus member for ``seed``: grid sides 2..4, up to 6 forks."""
    rng = random.Random(f"corpus:{seed}")
    m, n = rng.randint(2, 4), rng.randint(2, 4)
    return GenSpec(seed=seed, base=f"grid:{m},{n}", fork_count=rng.randint(0, 6))


def default_corpus(seeds=range(200)) -> list[Generated]:
    return [random_sps(corpus_spec(s)) for s in seeds]
