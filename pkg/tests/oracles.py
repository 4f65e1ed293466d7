"""Brute-force reference computations, independent of the package internals.

Everything here works from the cover pairs alone: the order is the
reflexive-transitive closure, meets and joins are found by scanning bounds,
and congruences are found by enumerating set partitions.
"""

from __future__ import annotations

from itertools import combinations


def order_from_covers(n, covers):
    leq = [[a == b for b in range(n)] for a in range(n)]
    for a, b in covers:
        leq[a][b] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                for j in range(n):
                    if leq[k][j]:
                        leq[i][j] = True
    return leq


def meet_join(n, leq):
    def best(cands, below):
        for c in cands:
            if all(leq[d][c] if below else leq[c][d] for d in cands):
                return c
        return None

    meet = [[None] * n for _ in range(n)]
    join = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            lower = [c for c in range(n) if leq[c][a] and leq[c][b]]
            upper = [c for c in range(n) if leq[a][c] and leq[b][c]]
            meet[a][b] = best(lower, True)
            join[a][b] = best(upper, False)
    return meet, join


class Ref:
    """A lattice rebuilt from its cover pairs only."""

    def __init__(self, n, covers):
        self.n = n
        self.covers = sorted(covers)
        self.leq = order_from_covers(n, covers)
        self.meet, self.join = meet_join(n, self.leq)

    @classmethod
    def of(cls, L):
        return cls(L.n, list(L.covers))


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def labels_of(blocks, n):
    lab = list(range(n))
    for b in blocks:
        m = min(b)
        for x in b:
            lab[x] = m
    return tuple(lab)


def substitution(ref, lab):
    for x, y in combinations(range(ref.n), 2):
        if lab[x] != lab[y]:
            continue
        for c in range(ref.n):
            if lab[ref.meet[x][c]] != lab[ref.meet[y][c]]:
                return False
            if lab[ref.join[x][c]] != lab[ref.join[y][c]]:
                return False
    return True


def all_congruence_labels(ref):
    """Every congruence, as canonical label tuples (n up to about 9)."""
    return [lab for lab in (labels_of(p, ref.n) for p in set_partitions(range(ref.n)))
            if substitution(ref, lab)]


def finer(a, b):
    return all(b[x] == b[a[x]] for x in range(len(a)))


def least_congruence(ref, pairs, congruences=None):
    congruences = congruences or all_congruence_labels(ref)
    good = [c for c in congruences if all(c[a] == c[b] for a, b in pairs)]
    least = [c for c in good if all(finer(c, d) for d in good)]
    assert len(least) == 1
    return least[0]


def blocks(lab):
    groups = {}
    for x, l in enumerate(lab):
        groups.setdefault(l, []).append(x)
    return sorted(groups.values())


def is_m3_free(ref):
    n = ref.n
    for x, y, z in combinations(range(n), 3):
        m = ref.meet[x][y]
        j = ref.join[x][y]
        if (ref.meet[x][z] == m and ref.meet[y][z] == m and ref.join[x][z] == j
                and ref.join[y][z] == j and len({x, y, z, m, j}) == 5):
            return False
    return True


def is_semimodular(ref, covers):
    cov = set(covers)
    for a in range(ref.n):
        for b in range(ref.n):
            if (ref.meet[a][b], a) in cov and (b, ref.join[a][b]) not in cov:
                return False
    return True


def naive_closure(ref, pairs):
    """Least congruence by plain fixpoint iteration over all collapsed pairs."""
    lab = list(range(ref.n))

    def merge(x, y):
        a, b = lab[x], lab[y]
        if a == b:
            return False
        lo, hi = min(a, b), max(a, b)
        for i in range(ref.n):
            if lab[i] == hi:
                lab[i] = lo
        return True

    for a, b in pairs:
        merge(a, b)
    changed = True
    while changed:
        changed = False
        for x, y in combinations(range(ref.n), 2):
            if lab[x] != lab[y]:
                continue
            for c in range(ref.n):
                changed |= merge(ref.meet[x][c], ref.meet[y][c])
                changed |= merge(ref.join[x][c], ref.join[y][c])
    return tuple(lab)
