"""Congruences of finite lattices.

A congruence is stored as a :class:`Partition` of the element ids; the
canonical label of an element is the smallest element of its block, so two
partitions are equal exactly when their label tuples are.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import NotACongruence, NotIntervalClasses, NotSublattice, TooLarge
from .lattice import Lattice, PrimeInterval


class DisjointSet:
    """Union-find over ``0 .. n-1`` with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def labels(self) -> tuple[int, ...]:
        return tuple(self.find(x) for x in range(len(self.parent)))


class Partition:
    """A partition of ``0 .. n-1``, immutable and hashable."""

    __slots__ = ("labels", "_blocks")

    def __init__(self, labels: Sequence[int]):
        first: dict[int, int] = {}
        canon = []
        for x, lab in enumerate(labels):
            canon.append(first.setdefault(lab, x))
        self.labels = tuple(canon)
        self._blocks = None

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int) -> "Partition":
        labels = list(range(n))
        seen = set()
        for block in blocks:
            block = sorted(block)
            for x in block:
                if x in seen:
                    raise ValueError(f"element {x} appears in two blocks")
                seen.add(x)
                labels[x] = block[0]
        return cls(labels)

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(range(n))

    @classmethod
    def total(cls, n: int) -> "Partition":
        return cls([0] * n)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def blocks(self) -> list[list[int]]:
        if self._blocks is None:
            groups: dict[int, list[int]] = {}
            for x, lab in enumerate(self.labels):
                groups.setdefault(lab, []).append(x)
            self._blocks = [groups[k] for k in sorted(groups)]
        return self._blocks

    def nontrivial_blocks(self) -> list[list[int]]:
        return [b for b in self.blocks if len(b) > 1]

    def block_of(self, x: int) -> list[int]:
        lab = self.labels[x]
        return [y for y, l in enumerate(self.labels) if l == lab]

    def same(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def is_identity(self) -> bool:
        return all(lab == x for x, lab in enumerate(self.labels))

    def is_total(self) -> bool:
        return all(lab == 0 for lab in self.labels)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __le__(self, other: "Partition") -> bool:
        """Refinement: every block of ``self`` lies inside a block of ``other``."""
        return all(other.labels[x] == other.labels[lab] for x, lab in enumerate(self.labels))

    def __lt__(self, other: "Partition") -> bool:
        return self != other and self <= other

    def __ge__(self, other):
        return other <= self

    def __gt__(self, other):
        return other < self

    @classmethod
    def _canonical(cls, labels) -> "Partition":
        """Wrap labels already equal to the least element of each block."""
        out = cls.__new__(cls)
        out.labels = tuple(labels)
        out._blocks = None
        return out

    def join(self, *others: "Partition") -> "Partition":
        """Equivalence join; for congruences this is the congruence join."""
        return Partition._canonical(_join_labels([self.labels] + [p.labels for p in others]))

    def serialize(self) -> str:
        """One line per block, sorted ids, blocks ordered by their minimum."""
        return "\n".join(" ".join(map(str, b)) for b in self.blocks)

    def __repr__(self):
        inner = ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"{type(self).__name__}({inner})"


def _join_labels(parts) -> list[int]:
    """Least labels of the join: propagate block minima until stable."""
    arrays = [np.asarray(p, dtype=np.intp) for p in parts]
    n = arrays[0].size
    lab = np.arange(n)
    while True:
        new = lab
        for arr in arrays:
            low = np.full(n, n)
            np.minimum.at(low, arr, new)
            new = low[arr]
        if np.array_equal(new, lab):
            return new.tolist()
        lab = new


class Congruence(Partition):
    """A partition known to be a congruence of ``lattice``."""

    __slots__ = ("lattice",)

    def __init__(self, lattice: Lattice, labels: Sequence[int], *, check: bool = True):
        super().__init__(labels)
        self.lattice = lattice
        if check:
            if not _interval_classes(lattice, self):
                raise NotIntervalClasses("blocks are not intervals")
            if not is_congruence(lattice, self):
                raise NotACongruence("partition lacks the substitution property")

    @classmethod
    def of(cls, lattice: Lattice, partition: Partition) -> "Congruence":
        return cls(lattice, partition.labels)

    def join(self, *others: Partition) -> "Congruence":
        out = Congruence.__new__(Congruence)
        out.labels = Partition.join(self, *others).labels
        out._blocks = None
        out.lattice = self.lattice
        return out


def parse_blocks(text: str, n: int) -> Partition:
    """Inverse of :meth:`Partition.serialize`; missing elements are singletons."""
    blocks = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            blocks.append([int(tok) for tok in line.split()])
    for block in blocks:
        for x in block:
            if not 0 <= x < n:
                raise ValueError(f"element {x} outside 0..{n - 1}")
    return Partition.from_blocks(blocks, n)


# generation ----------------------------------------------------------------

def _close(L: Lattice, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    """Least congruence containing ``pairs``; returns canonical labels.

    Each round translates the pairs merged in the previous round by every
    element (meet and join).  Merged pairs span every block, so this reaches
    the closure.  Roots are always the least element of their block.
    """
    n = L.n
    meet, join, _, _ = L.tables()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def merge(batch):
        done = []
        for a, b in batch:
            ra, rb = find(a), find(b)
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
                done.append((ra, rb))
        return done

    work = merge(pairs)
    while work:
        A = np.fromiter((a for a, _ in work), dtype=np.intp, count=len(work))
        B = np.fromiter((b for _, b in work), dtype=np.intp, count=len(work))
        roots = np.fromiter((find(x) for x in range(n)), dtype=np.intp, count=n)
        xs = roots[np.concatenate((meet[A].ravel(), join[A].ravel()))]
        ys = roots[np.concatenate((meet[B].ravel(), join[B].ravel()))]
        keep = xs != ys
        if not keep.any():
            break
        codes = np.unique(xs[keep] * n + ys[keep])
        work = merge(zip((codes // n).tolist(), (codes % n).tolist()))
    return tuple(find(x) for x in range(n))


def congruence_generated(L: Lattice, pairs: Iterable[tuple[int, int]]) -> Congruence:
    return Congruence(L, _close(L, pairs), check=False)


def principal_congruence(L: Lattice, a: int, b: int) -> Congruence:
    """con(a, b): the least congruence collapsing ``a`` and ``b``."""
    return congruence_generated(L, [(a, b)])


def identity(L: Lattice) -> Congruence:
    return Congruence(L, range(L.n), check=False)


def total(L: Lattice) -> Congruence:
    return Congruence(L, [0] * L.n, check=False)


# tests for the substitution property --------------------------------------

def is_congruence(L: Lattice, P: Partition) -> bool:
    """Direct check: collapsed pairs stay collapsed under meet and join.

    Comparing each element with the least element of its block suffices,
    as the relation is transitive.
    """
    if len(P.labels) != L.n:
        raise ValueError("partition and lattice differ in size")
    meet, join, _, _ = L.tables()
    lab = np.asarray(P.labels, dtype=np.int32)
    for table in (meet, join):
        rows = lab[table]
        if not np.array_equal(rows, rows[lab]):
            return False
    return True


def _interval_classes(L: Lattice, P: Partition) -> bool:
    for block in P.nontrivial_blocks():
        lo, hi = block[0], block[0]
        for x in block[1:]:
            lo, hi = L.meet[lo][x], L.join[hi][x]
        if P.labels[lo] != P.labels[block[0]] or P.labels[hi] != P.labels[block[0]]:
            return False
        if len(L.interval(lo, hi)) != len(block):
            return False
    return True


def has_interval_classes(L: Lattice, P: Partition) -> bool:
    return _interval_classes(L, P)


def is_congruence_via_covers(L: Lattice, P: Partition) -> bool:
    """Cover-level test for equivalences whose classes are intervals.

    (C-join): for a < b, a < c covers with b != c, a = b implies c = b v c.
    (C-meet): the dual.  Raises :class:`NotIntervalClasses` when some class
    is not an interval.
    """
    if not _interval_classes(L, P):
        raise NotIntervalClasses("the cover-level test needs interval classes")
    lab = P.labels
    for a in range(L.n):
        for seq, op in ((L.upper[a], L.join), (L.lower[a], L.meet)):
            if len(seq) < 2:
                continue
            for b in seq:
                if lab[a] != lab[b]:
                    continue
                for c in seq:
                    if c != b and lab[c] != lab[op[b][c]]:
                        return False
    return True


# perspectivity --------------------------------------------------------------

def cpersp_up(L: Lattice, I, J) -> bool:
    (a, b), (c, d) = I, J
    return L.leq(a, c) and d == L.join[b][c]


def cpersp_down(L: Lattice, I, J) -> bool:
    (a, b), (c, d) = I, J
    return L.leq(d, b) and c == L.meet[a][d]


def cpersp(L: Lattice, I, J) -> bool:
    return cpersp_up(L, I, J) or cpersp_down(L, I, J)


def _persp_successors(L: Lattice, I):
    a, b = I
    out = set()
    for c in L.filter(a):
        out.add((c, L.join[b][c]))
    for d in L.ideal(b):
        out.add((L.meet[a][d], d))
    return out


class CprojIndex:
    """Congruence-projectivity reachability for every interval of a lattice.

    ``primes_from(I)`` is the set of prime intervals ``q`` with ``I`` cproj
    ``q``.  Computed once as a least fixpoint over the perspectivity graph,
    with prime sets stored as bitmasks.
    """

    def __init__(self, L: Lattice):
        self.lattice = L
        primes = L.primes()
        self.primes = primes
        bit = {tuple(p): 1 << i for i, p in enumerate(primes)}
        nodes = [(a, b) for a in range(L.n) for b in L.filter(a) if a != b]
        succ = {I: [J for J in _persp_successors(L, I) if J[0] != J[1]] for I in nodes}
        reach = {I: bit.get(I, 0) for I in nodes}
        changed = True
        while changed:
            changed = False
            for I in nodes:
                acc = reach[I]
                for J in succ[I]:
                    acc |= reach[J]
                if acc != reach[I]:
                    reach[I] = acc
                    changed = True
        self._reach = reach

    def primes_from(self, I) -> set[PrimeInterval]:
        mask = self._reach.get(tuple(I), 0)
        return {p for i, p in enumerate(self.primes) if (mask >> i) & 1}

    def cproj(self, I, q) -> bool:
        mask = self._reach.get(tuple(I), 0)
        return bool(mask >> self.primes.index(PrimeInterval(*q)) & 1)


def cproj(L: Lattice, I, J) -> bool:
    """Breadth-first search for a chain of perspectivities from ``I`` to ``J``."""
    I, J = tuple(I), tuple(J)
    seen = {I}
    queue = deque([I])
    while queue:
        K = queue.popleft()
        if K == J:
            return True
        for nxt in _persp_successors(L, K):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def collapses_iff_cproj_check(L: Lattice, a: int, b: int, q) -> bool:
    """Whether con(a, b) collapses the prime interval ``q``.

    Cross-checks the answer against projectivity from some prime interval
    inside ``[a, b]`` and raises ``AssertionError`` if they disagree.
    """
    q = PrimeInterval(*q)
    theta = principal_congruence(L, a, b)
    collapsed = theta.same(q.bottom, q.top)
    inside = L.interval(a, b)
    via = any(cproj(L, p, q) for p in L.primes() if p.bottom in inside and p.top in inside)
    if collapsed != via:
        raise AssertionError(f"collapse of {q} by con({a},{b}) disagrees with projectivity")
    return collapsed


# restriction and extension ------------------------------------------------

def restrict(theta: Partition, ids: Sequence[int], lattice: Lattice | None = None) -> Partition:
    """Partition induced on ``ids``; element ``i`` of the result is ``ids[i]``."""
    host = lattice if lattice is not None else getattr(theta, "lattice", None)
    if host is not None and not host.is_sublattice(ids):
        raise NotSublattice("restriction target is not a sublattice")
    return Partition([theta.labels[x] for x in ids])


def generated_in_extension(alpha: Partition, K: Lattice, embed: Sequence[int]):
    """Least congruence of ``K`` containing ``alpha`` (given on ``L``).

    ``embed[x]`` is the id in ``K`` of element ``x`` of ``L``.  Returns the
    congruence together with a flag telling whether it restricts back to
    ``alpha``, i.e. whether it is the minimal extension.
    """
    pairs = [(embed[x], embed[lab]) for x, lab in enumerate(alpha.labels) if x != lab]
    bar = congruence_generated(K, pairs)
    return bar, restrict(bar, embed) == Partition(alpha.labels)


# join-irreducible congruences -------------------------------------------

@dataclass
class JiOrder:
    """The join-irreducible congruences con(p) ordered by containment."""

    lattice: Lattice
    nodes: list[Congruence]
    reps: list[PrimeInterval]
    node_of: dict[PrimeInterval, int]
    leq: list[list[bool]] = field(repr=False)

    def __len__(self):
        return len(self.nodes)

    def index(self, theta: Partition) -> int | None:
        for i, node in enumerate(self.nodes):
            if node == theta:
                return i
        return None

    def upper_covers(self, i: int) -> list[int]:
        above = [j for j in range(len(self)) if j != i and self.leq[i][j]]
        return [j for j in above
                if not any(k != j and self.leq[k][j] for k in above)]

    def lower_covers(self, i: int) -> list[int]:
        below = [j for j in range(len(self)) if j != i and self.leq[j][i]]
        return [j for j in below
                if not any(k != j and self.leq[j][k] for k in below)]


def _square_classes(L: Lattice) -> list[list[PrimeInterval]]:
    """Group prime intervals that are opposite sides of covering squares.

    Opposite sides are perspective, so they generate the same congruence.
    """
    primes = L.primes()
    index = {p: i for i, p in enumerate(primes)}
    uf = DisjointSet(len(primes))
    for o in range(L.n):
        ups = L.upper[o]
        for i, a in enumerate(ups):
            for b in ups[i + 1:]:
                t = L.join[a][b]
                if L.is_cover(a, t) and L.is_cover(b, t):
                    uf.union(index[(o, a)], index[(b, t)])
                    uf.union(index[(o, b)], index[(a, t)])
    groups: dict[int, list[PrimeInterval]] = {}
    for p in primes:
        groups.setdefault(uf.find(index[p]), []).append(p)
    return [groups[k] for k in sorted(groups)]


def ji_congruences(L: Lattice) -> JiOrder:
    nodes: list[Congruence] = []
    reps: list[PrimeInterval] = []
    node_of: dict[PrimeInterval, int] = {}
    seen: dict[Partition, int] = {}
    for group in _square_classes(L):
        p = group[0]
        theta = principal_congruence(L, p.bottom, p.top)
        i = seen.get(theta)
        if i is None:
            i = seen[theta] = len(nodes)
            nodes.append(theta)
            reps.append(p)
        for q in group:
            node_of[q] = i
    leq = [[a <= b for b in nodes] for a in nodes]
    return JiOrder(L, nodes, reps, node_of, leq)


def down_sets(order: JiOrder) -> list[frozenset[int]]:
    """Every down-set of the node order (including the empty one)."""
    k = len(order)
    below = [frozenset(j for j in range(k) if order.leq[j][i]) for i in range(k)]
    out = []

    # visit nodes so that everything below a node comes first
    seq = sorted(range(k), key=lambda i: len(below[i]))

    def grow(pos, current):
        if pos == k:
            out.append(frozenset(current))
            return
        i = seq[pos]
        grow(pos + 1, current)
        if below[i] - {i} <= current:
            current.add(i)
            grow(pos + 1, current)
            current.discard(i)

    grow(0, set())
    return out


def all_congruences(L: Lattice, order: JiOrder | None = None, limit: int = 20) -> list[Congruence]:
    """All congruences of ``L``, as joins over down-sets of the Ji order."""
    order = order or ji_congruences(L)
    if len(order) > limit:
        raise TooLarge(f"{len(order)} join-irreducible congruences exceed the limit {limit}")
    out = []
    for d in down_sets(order):
        if not d:
            out.append(identity(L))
        else:
            parts = [order.nodes[i] for i in sorted(d)]
            out.append(parts[0].join(*parts[1:]))
    return out
