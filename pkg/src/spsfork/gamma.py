"""Protrusions and the congruence generated by the new middle element.

For a tight square the congruence con(m, t) of L[S] is assembled stage by
stage, region by region, and then compared with the closure computed
directly.  Wide squares, the new join-irreducible congruence and its upper
covers are handled at the end of the module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .congruence import (
    Congruence,
    JiOrder,
    Partition,
    congruence_generated,
    generated_in_extension,
    is_congruence,
    is_congruence_via_covers,
    ji_congruences,
    principal_congruence,
    restrict,
)
from .errors import (
    EmbeddingInconsistent,
    HasProtrusion,
    NoProtrusion,
    NonTermination,
    NotACongruence,
    NotIntervalClasses,
    NotTight,
    NotWide,
)
from .fork import ForkContext
from .iso import is_isomorphic
from .lattice import Lattice, PrimeInterval
from .structure import (
    TIGHT,
    WIDE,
    between,
    boundary_below,
    chain_sides,
    is_distributive,
    left_wing,
    right_wing,
)

LEFT, RIGHT = "left", "right"


# chains and protrusions --------------------------------------------------------

def initial_chains(L: Lattice, S) -> tuple[list[int], list[int]]:
    """The two maximal chains of the ideal of t running along the wings.

    Each is listed from t downward: t, then the upper ends of the wing
    intervals, then the boundary of L.
    """
    o, al, ar, t = tuple(S)[:4]
    chains = []
    for side, wing in ((LEFT, left_wing(L, PrimeInterval(o, al))),
                       (RIGHT, right_wing(L, PrimeInterval(o, ar)))):
        tops = [p.top for p in wing]
        chains.append([t] + tops + boundary_below(L, tops[-1], side))
    return chains[0], chains[1]


@dataclass(frozen=True)
class ProtrusionRecord:
    """A protrusion at ``p``, the highest chain element below t with a
    lower cover outside the chain on ``side``.

    ``k`` is the position of ``p`` in the chain (t has position 0).  On the
    left ``p_l`` is the next chain element and ``p_r`` the lower cover just
    right of it; on the right the roles are mirrored.  ``wing`` starts at
    [chain[k+2], q_1] and runs outward; ``new_elements`` are its upper ends.
    ``k_star`` is the chain position of the last lower end, or ``None``
    when some lower end leaves the chain.  ``generator`` is the prime
    interval [p_l ^ p_r, inner lower cover] whose congruence the
    protrusion forces.  ``meets_next_but_one`` tells whether q_1 meets the
    next chain element in the chain element after it; this fails when the
    next chain element has its own lower cover outside the chain.
    """

    side: str
    p: int
    k: int
    p_l: int
    p_r: int
    q_1: int
    k_star: int | None
    wing: tuple[PrimeInterval, ...]
    new_elements: tuple[int, ...]
    generator: tuple[int, int]
    meets_next_but_one: bool

    @property
    def next_on_chain(self) -> int:
        return self.p_l if self.side == LEFT else self.p_r

    @property
    def inner(self) -> int:
        """The lower cover of p on the far side of the chain from q_1."""
        return self.p_r if self.side == LEFT else self.p_l


def chain_protrusions(L: Lattice, chain, side: str, top: int | None = None) -> list[ProtrusionRecord]:
    """Every chain element below the top with a lower cover outside the
    chain on ``side``, highest first."""
    top = chain[0] if top is None else top
    left_of, right_of = chain_sides(L, chain, L.ideal(top))
    outside = left_of if side == LEFT else right_of
    return [_protrusion_at(L, chain, k, side, outside) for k in range(1, len(chain))
            if any(c in outside for c in L.lower[chain[k]])]


def find_protrusion(L: Lattice, chain, side: str, top: int | None = None) -> ProtrusionRecord | None:
    """Largest protrusion on ``chain`` (listed from its top downward).

    Works in the ideal of ``top`` (default: the chain's first element).
    """
    found = chain_protrusions(L, chain, side, top)
    return found[0] if found else None


def _protrusion_at(L: Lattice, chain, k: int, side: str, outside) -> ProtrusionRecord:
    p = chain[k]
    if k + 2 >= len(chain):
        raise EmbeddingInconsistent("protrusion too close to the bottom of the chain")
    nxt = chain[k + 1]
    seq = L.lower[p]
    j = seq.index(nxt)
    step = -1 if side == LEFT else 1
    if not (0 <= j + step < len(seq) and 0 <= j - step < len(seq)):
        raise EmbeddingInconsistent("protrusion lacks a neighbour on one side of the chain")
    q1, inner = seq[j + step], seq[j - step]
    if q1 not in outside or inner in outside:
        raise EmbeddingInconsistent("lower covers of the protrusion are out of order")
    base = L.meet[q1][nxt]
    if not (L.is_cover(base, nxt) and L.is_cover(base, q1)):
        raise AssertionError(f"at protrusion {p}: q_1 and the next chain element do not form a square")
    walk = left_wing if side == LEFT else right_wing
    wing = tuple(walk(L, PrimeInterval(base, q1)))
    bottoms = [w.bottom for w in wing]
    k_star = None
    if bottoms == chain[k + 2:k + 2 + len(bottoms)]:
        k_star = k + 1 + len(bottoms)
    p_l, p_r = (nxt, inner) if side == LEFT else (inner, nxt)
    return ProtrusionRecord(side, p, k, p_l, p_r, q1, k_star, wing, tuple(w.top for w in wing),
                            (L.meet[p_l][p_r], inner), base == chain[k + 2])


def _advance(L: Lattice, chain, rec: ProtrusionRecord) -> list[int]:
    """Route the chain through the protrusion and down the boundary."""
    new = list(rec.new_elements)
    return list(chain[:rec.k + 1]) + new + boundary_below(L, new[-1], rec.side)


def has_protrusion(L: Lattice, S) -> bool:
    cl, cr = initial_chains(L, S)
    return find_protrusion(L, cl, LEFT) is not None or find_protrusion(L, cr, RIGHT) is not None


def is_distributive_square(L: Lattice, S) -> bool:
    """Whether the ideal of the square's top is distributive."""
    dist = is_distributive(L, L.ideal(tuple(S)[3]))
    if dist and has_protrusion(L, S):
        raise AssertionError("a distributive square has a protrusion")
    return dist


# delta: the protrusion-free case ---------------------------------------------

def delta_partition(ctx: ForkContext) -> Partition:
    """Singletons except [z, x] along both wings and [m, t]."""
    K = ctx.lattice
    return Partition.from_blocks([list(p) for p in ctx.generator_primes()], K.n)


def delta_congruence(ctx: ForkContext) -> Congruence:
    """The explicit congruence for a square without protrusions.

    For a tight square it is checked against the closure of (m, t).  For a
    wide square only the congruence property is checked; when it fails
    :class:`NotACongruence` is raised.
    """
    L, K = ctx.base, ctx.lattice
    if has_protrusion(L, ctx.square):
        raise HasProtrusion("the square has a protrusion")
    delta = delta_partition(ctx)
    if ctx.square.kind == TIGHT:
        if not is_congruence_via_covers(K, delta):
            raise AssertionError("delta fails the cover-level congruence test")
        if delta != principal_congruence(K, ctx.m, ctx.embed[ctx.square.t]):
            raise AssertionError("delta differs from con(m, t)")
        return Congruence(K, delta.labels, check=False)
    if not is_congruence(K, delta):
        raise NotACongruence("delta is not a congruence for this wide square")
    return Congruence(K, delta.labels, check=False)


# gamma on the growing sublattices -----------------------------------------

@dataclass
class GammaState:
    stage: int
    left_chain: list[int]
    right_chain: list[int]
    K: frozenset[int]
    gamma: Partition            # on L[S]; singletons outside K
    pi: Congruence              # on L
    protrusion: ProtrusionRecord | None
    checks: dict[str, bool] = field(default_factory=dict)


@dataclass
class GammaResult:
    gamma: Congruence
    pi: Congruence
    trace: list[GammaState]
    oracle: Congruence | None = None

    @property
    def matches_oracle(self) -> bool | None:
        return None if self.oracle is None else self.gamma == self.oracle


def _lift_chain(ctx: ForkContext, chain) -> list[int]:
    """Map a chain of L into L[S], inserting z wherever a cover was split."""
    e = ctx.embed
    pairs = {}
    for wing, zs in ((ctx.left_wing, ctx.z_left), (ctx.right_wing, ctx.z_right)):
        for (y, x), z in zip(wing, zs):
            pairs[(y, x)] = z
    out = [e[chain[0]]]
    for hi, lo in zip(chain, chain[1:]):
        if (lo, hi) in pairs:
            out.append(pairs[(lo, hi)])
        out.append(e[lo])
    return out


def _gamma_on(ctx: ForkContext, region, gens) -> tuple[Partition, Lattice, list[int]]:
    """Join of the [z, x] and [m, t] pairs with con_region(gens), on L[S]."""
    K = ctx.lattice
    sub, ids = K.sublattice(region)
    local = {x: i for i, x in enumerate(ids)}
    pi_local = congruence_generated(sub, [(local[a], local[b]) for a, b in gens])
    labels = list(range(K.n))
    for i, lab in enumerate(pi_local.labels):
        labels[ids[i]] = ids[lab]
    pieces = Partition(labels)
    G = Partition.from_blocks([list(p) for p in ctx.generator_primes()
                               if p.bottom in region and p.top in region], K.n)
    return pieces.join(G), sub, ids


def _explicit_blocks(ctx: ForkContext, chain, rec: ProtrusionRecord, gamma: Partition) -> dict[str, bool]:
    """Compare first-stage classes with their explicit shapes.

    Keys: ``class_top`` ({m, t}), ``class_plain`` ({x, z} away from the
    protrusion), ``class_four`` ({x_k, x_k+1, z_k, z_k+1}), ``class_pair``
    ({y_k, y_k+1}) and ``class_triples`` ({a, x, z} along the protrusion).
    Empty when the protrusion wing does not sit on the chain.
    """
    if rec.k_star is None:
        return {}
    e = ctx.embed
    wing = ctx.left_wing if rec.side == LEFT else ctx.right_wing
    zs = ctx.z_left if rec.side == LEFT else ctx.z_right
    n = len(wing)
    k, ks = rec.k, rec.k_star
    if ks > n or chain[1:n + 1] != [x for _, x in wing]:
        return {}
    x = {i: e[wing[i - 1][1]] for i in range(1, n + 1)}
    y = {i: e[wing[i - 1][0]] for i in range(1, n + 1)}
    z = {i: zs[i - 1] for i in range(1, n + 1)}
    a = {k + 2 + j: e[v] for j, v in enumerate(rec.new_elements)}

    def has(block, rep):
        return set(gamma.block_of(rep)) == block

    t = e[ctx.square.t]
    return {
        "class_top": has({ctx.m, t}, t),
        "class_plain": all(has({x[i], z[i]}, x[i]) for i in range(1, n + 1) if i < k or i > ks),
        "class_four": has({x[k], x[k + 1], z[k], z[k + 1]}, x[k]),
        "class_pair": has({y[k], y[k + 1]}, y[k]),
        "class_triples": all(has({a[i], x[i], z[i]}, x[i]) for i in range(k + 2, ks + 1)),
    }


def gamma_full(ctx: ForkContext, *, verify: bool = True) -> GammaResult:
    """con(m, t) of L[S] for a tight square, built stage by stage.

    Each stage collects the protrusions on both chains and adds their prime
    intervals to the generators of the residual congruence.  The highest one
    (left chain first) widens the current sublattice by its wing and
    re-routes its chain; gamma on the sublattice is the join of the
    residual congruence there with the pairs [z, x] and [m, t].  When no protrusion
    remains, the sublattice is the whole ideal of t and the residual
    congruence of L supplies the classes outside it.
    """
    if ctx.square.kind != TIGHT:
        raise NotTight("the stage construction needs a tight square")
    L, K, e = ctx.base, ctx.lattice, ctx.embed
    t = ctx.square.t
    ideal_K = K.ideal(e[t])
    chains = {}
    chains[LEFT], chains[RIGHT] = initial_chains(L, ctx.square)
    gens: list[tuple[int, int]] = []
    trace: list[GammaState] = []
    limit = L.n + 1
    for stage in range(1, limit + 1):
        found = (chain_protrusions(L, chains[LEFT], LEFT, t)
                 + chain_protrusions(L, chains[RIGHT], RIGHT, t))
        lifted = (_lift_chain(ctx, chains[LEFT]), _lift_chain(ctx, chains[RIGHT]))
        btw = between(K, lifted[0], lifted[1], ideal_K)
        if not found:
            pi = congruence_generated(L, gens)
            checks = {"sublattice": K.is_sublattice(btw), "ideal": btw == ideal_K}
            gamma_k, _, _ = _gamma_on(ctx, ideal_K, [(e[a], e[b]) for a, b in gens])
            trace.append(GammaState(stage, chains[LEFT], chains[RIGHT], btw, gamma_k, pi, None, checks))
            break
        rec = found[0]
        # protrusions lower on the chains are bypassed by the re-routed
        # chain, so their intervals join the generators now
        for other in found:
            if other.generator not in gens:
                gens.append(other.generator)
        pi = congruence_generated(L, gens)
        region = btw | {e[v] for v in rec.new_elements}
        checks = {"sublattice": K.is_sublattice(region), "regular": rec.meets_next_but_one}
        gamma_k = None
        if checks["sublattice"]:
            gamma_k, sub, ids = _gamma_on(ctx, region, [(e[a], e[b]) for a, b in gens])
            try:
                checks["congruence"] = is_congruence_via_covers(sub, restrict(gamma_k, ids))
            except NotIntervalClasses:
                checks["congruence"] = False
            if stage == 1:
                checks.update(_explicit_blocks(ctx, chains[rec.side], rec, gamma_k))
        trace.append(GammaState(stage, chains[LEFT], chains[RIGHT], frozenset(region),
                                gamma_k, pi, rec, checks))
        chains[rec.side] = _advance(L, chains[rec.side], rec)
    else:
        raise NonTermination(f"no fixpoint after {limit} stages")

    lifted_pi = Partition.from_blocks([[e[x] for x in b] for b in pi.blocks], K.n)
    gamma = Congruence(K, trace[-1].gamma.join(lifted_pi).labels, check=False)
    result = GammaResult(gamma, pi, trace)
    if verify:
        result.oracle = principal_congruence(K, ctx.m, e[t])
        if not trace[-1].checks["ideal"]:
            raise AssertionError("final sublattice is not the ideal of t")
        if not is_congruence_via_covers(K, gamma):
            raise AssertionError("constructed gamma fails the cover-level congruence test")
        if gamma != result.oracle:
            raise AssertionError("constructed gamma differs from con(m, t)")
    return result


def gamma_on_K(ctx: ForkContext) -> GammaState:
    """The first stage for a square with a protrusion."""
    if ctx.square.kind != TIGHT:
        raise NotTight("the stage construction needs a tight square")
    first = gamma_full(ctx, verify=False).trace[0]
    if first.protrusion is None:
        raise NoProtrusion("the square has no protrusion; use delta_congruence")
    return first


# wide squares -------------------------------------------------------------------

@dataclass
class WideSquareReport:
    generator: tuple[int, int]          # (t, a) with a the third lower cover
    side: str                           # where a lies
    near: int                           # the side of S next to a
    gamma: Congruence
    via_third: Congruence               # least extension of con_L(t, a)
    via_near: Congruence                # least extension of con_L(near, t)
    near_bar: Congruence                # con_{L[S]}(near, t)
    upper_witness: bool
    lower_witness: bool

    @property
    def equals_via_third(self) -> bool:
        return self.gamma == self.via_third

    @property
    def equals_near_bar(self) -> bool:
        return self.gamma == self.near_bar

    @property
    def generated_by_L(self) -> bool:
        return self.gamma == self.via_near


def _generated(K: Lattice, elems) -> frozenset[int]:
    s = set(elems)
    while True:
        new = {K.meet[a][b] for a in s for b in s} | {K.join[a][b] for a in s for b in s}
        if new <= s:
            return frozenset(s)
        s |= new


def _s7_witness(K: Lattice, gens, pair, target) -> bool:
    """In the sublattice generated by ``gens`` (an S7), does con(pair)
    collapse ``target``?"""
    from .generators import named
    elems = _generated(K, gens)
    sub, ids = K.sublattice(elems)
    if not is_isomorphic(sub, named("s7")):
        return False
    local = {x: i for i, x in enumerate(ids)}
    theta = principal_congruence(sub, local[pair[0]], local[pair[1]])
    return theta.same(local[target[0]], local[target[1]])


def wide_square_gamma(ctx: ForkContext) -> WideSquareReport:
    if ctx.square.kind != WIDE:
        raise NotWide("the square is tight")
    L, K, e = ctx.base, ctx.lattice, ctx.embed
    o, al, ar, t, _ = ctx.square
    seq = L.lower[t]
    i = seq.index(ar)
    if i + 1 < len(seq):
        a, side, near, far = seq[i + 1], RIGHT, ar, al
    else:
        a, side, near, far = seq[seq.index(al) - 1], LEFT, al, ar
    gamma = principal_congruence(K, ctx.m, e[t])
    via_third, _ = generated_in_extension(principal_congruence(L, t, a), K, e)
    via_near, _ = generated_in_extension(principal_congruence(L, near, t), K, e)
    near_bar = principal_congruence(K, e[near], e[t])
    upper = _s7_witness(K, (e[far], ctx.m, e[near]), (e[near], e[t]), (ctx.m, e[t]))
    lower = _s7_witness(K, (ctx.m, e[near], e[a]), (ctx.m, e[t]), (e[near], e[t]))
    return WideSquareReport((t, a), side, near, gamma, via_third, via_near, near_bar, upper, lower)


# join-irreducible congruences of L[S] ----------------------------------------------

@dataclass
class NewJiReport:
    order: JiOrder
    old: list[int]
    new: list[int]
    gamma_index: int | None


def new_ji_nodes(ctx: ForkContext, order: JiOrder | None = None,
                 base_order: JiOrder | None = None) -> NewJiReport:
    """Split Ji(Con L[S]) into nodes generated by some con_L(p) and the rest.

    The least extension of con_L(p) depends only on con_L(p), so one
    representative prime per Ji node of L is lifted.
    """
    L, K, e = ctx.base, ctx.lattice, ctx.embed
    order = order or ji_congruences(K)
    base_order = base_order or ji_congruences(L)
    old = set()
    for p in base_order.reps:
        theta = principal_congruence(K, e[p.bottom], e[p.top])
        idx = order.index(theta)
        if idx is None:
            raise AssertionError("a lifted prime congruence is missing from the Ji order")
        old.add(idx)
    new = [i for i in range(len(order)) if i not in old]
    gamma = principal_congruence(K, ctx.m, e[ctx.square.t])
    return NewJiReport(order, sorted(old), new, order.index(gamma))


def new_ji_check(ctx: ForkContext, order: JiOrder | None = None,
                 base_order: JiOrder | None = None) -> NewJiReport:
    if ctx.square.kind != TIGHT:
        raise NotTight("only tight squares create a new join-irreducible congruence")
    rep = new_ji_nodes(ctx, order, base_order)
    if rep.new != [rep.gamma_index]:
        raise AssertionError(f"new Ji nodes {rep.new}, expected only gamma ({rep.gamma_index})")
    return rep


def gamma_generators(ctx: ForkContext, order: JiOrder | None = None) -> set[PrimeInterval]:
    """The primes [z, x] and [m, t]; checks they are exactly the primes
    generating gamma."""
    if ctx.square.kind != TIGHT:
        raise NotTight("gamma generators are described for tight squares")
    K = ctx.lattice
    order = order or ji_congruences(K)
    G = set(ctx.generator_primes())
    gamma = order.index(principal_congruence(K, ctx.m, ctx.embed[ctx.square.t]))
    hits = {p for p in K.primes() if order.node_of[p] == gamma}
    if hits != G:
        raise AssertionError(f"primes generating gamma {sorted(hits)} differ from {sorted(G)}")
    return G


@dataclass
class UpperCoverReport:
    covers: list[Congruence]
    alpha_bar_l: Congruence
    alpha_bar_r: Congruence

    @property
    def single(self) -> bool:
        return len(self.covers) == 1


def gamma_upper_covers(ctx: ForkContext, order: JiOrder | None = None) -> UpperCoverReport:
    if ctx.square.kind != TIGHT:
        raise NotTight("upper covers of gamma are described for tight squares")
    K, e = ctx.lattice, ctx.embed
    o, al, ar, t, _ = ctx.square
    order = order or ji_congruences(K)
    gi = order.index(principal_congruence(K, ctx.m, e[t]))
    bar_l = principal_congruence(K, e[al], e[t])
    bar_r = principal_congruence(K, e[ar], e[t])
    covers = [order.nodes[j] for j in order.upper_covers(gi)]
    if not 1 <= len(covers) <= 2 or any(c not in (bar_l, bar_r) for c in covers):
        raise AssertionError("gamma's upper covers are not among the two side congruences")
    for j, node in enumerate(order.nodes):
        if j != gi and order.leq[gi][j] and not (bar_l <= node or bar_r <= node):
            raise AssertionError(f"node {j} lies above gamma but above neither side congruence")
    return UpperCoverReport(covers, bar_l, bar_r)


@dataclass
class JiComparison:
    isotone: bool
    injective: bool
    embedding: bool
    images: list[Congruence]


def ji_comparison(ctx: ForkContext) -> JiComparison:
    """How the least-extension map acts on the Ji nodes of L."""
    L, K, e = ctx.base, ctx.lattice, ctx.embed
    src = ji_congruences(L)
    images = [generated_in_extension(node, K, e)[0] for node in src.nodes]
    k = len(images)
    isotone = all(images[i] <= images[j] for i in range(k) for j in range(k) if src.leq[i][j])
    if not isotone:
        raise AssertionError("the least-extension map is not isotone")
    injective = len(set(images)) == k
    embedding = all((images[i] <= images[j]) == src.leq[i][j] for i in range(k) for j in range(k))
    return JiComparison(isotone, injective, embedding, images)
