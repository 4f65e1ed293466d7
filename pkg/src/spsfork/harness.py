"""Theorem checks over corpora of SPS lattices.

Every check yields :class:`CheckRecord` values, one per (lattice, square,
theorem) or per lattice for lattice-level properties.  Records serialize to
one JSON object per line.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .congruence import (
    CprojIndex,
    JiOrder,
    Partition,
    all_congruences,
    congruence_generated,
    generated_in_extension,
    has_interval_classes,
    is_congruence,
    is_congruence_via_covers,
    ji_congruences,
    principal_congruence,
    restrict,
)
from .fork import ForkContext, extend_one, extend_zero, extends, insert_fork
from .gamma import (
    delta_congruence,
    gamma_full,
    gamma_generators,
    gamma_upper_covers,
    has_protrusion,
    initial_chains,
    chain_protrusions,
    ji_comparison,
    new_ji_check,
    new_ji_nodes,
    wide_square_gamma,
    LEFT,
    RIGHT,
)
from .generators import default_corpus
from .io import read_lattice, read_manifest
from .lattice import Lattice
from .structure import (
    TIGHT,
    WIDE,
    covering_squares,
    is_semimodular,
    is_slim,
    is_slim_two_chains,
    upper_cover_count_ok,
)

THEOREMS = ("closure", "1", "2", "3", "4", "delta", "gamma", "technical", "cproj", "jimap")


@dataclass
class CheckRecord:
    lattice: str
    square: tuple[int, int, int, int] | None
    theorem: str
    passed: bool
    detail: dict = field(default_factory=dict)
    witness: dict[str, str] = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> str:
        return json.dumps({
            "lattice": self.lattice,
            "square": None if self.square is None else ",".join(map(str, self.square)),
            "theorem": self.theorem,
            "verdict": "pass" if self.passed else "fail",
            "detail": self.detail,
            "witness": self.witness,
            "seconds": round(self.seconds, 4),
        }, sort_keys=True)


@dataclass
class Instance:
    ident: str
    lattice: Lattice
    stages: tuple[Lattice, ...] = ()
    _forks: dict = field(default_factory=dict, repr=False)
    _orders: dict = field(default_factory=dict, repr=False)
    _order: JiOrder | None = field(default=None, repr=False)

    def fork(self, S) -> ForkContext:
        key = tuple(S)[:4]
        if key not in self._forks:
            self._forks[key] = insert_fork(self.lattice, S)[1]
        return self._forks[key]

    def fork_order(self, S) -> JiOrder:
        key = tuple(S)[:4]
        if key not in self._orders:
            self._orders[key] = ji_congruences(self.fork(S).lattice)
        return self._orders[key]

    @property
    def order(self) -> JiOrder:
        if self._order is None:
            self._order = ji_congruences(self.lattice)
        return self._order

    def squares(self, kind: str | None = None):
        return [s for s in covering_squares(self.lattice) if kind is None or s.kind == kind]


def corpus_instances(seeds: Iterable[int] = range(200)) -> list[Instance]:
    return [Instance(f"seed:{g.spec.seed}", g.lattice, tuple(g.stages))
            for g in default_corpus(seeds)]


def manifest_instances(path) -> list[Instance]:
    return [Instance(f"seed:{e.seed}", read_lattice(e.path)) for e in read_manifest(path)]


def _timed(fn: Callable[[], CheckRecord]) -> CheckRecord:
    start = time.perf_counter()
    rec = fn()
    rec.seconds = time.perf_counter() - start
    return rec


def _failure(inst: Instance, S, theorem: str, exc: Exception) -> CheckRecord:
    key = None if S is None else tuple(S)[:4]
    return CheckRecord(inst.ident, key, theorem, False, {"error": f"{type(exc).__name__}: {exc}"})


def _guarded(inst: Instance, S, theorem: str, body: Callable[[], CheckRecord]) -> CheckRecord:
    def run():
        try:
            return body()
        except AssertionError as exc:
            return _failure(inst, S, theorem, exc)
    return _timed(run)


# closure of the construction ---------------------------------------------------

def check_closure(inst: Instance) -> Iterator[CheckRecord]:
    def body():
        bad = []
        for i, L in enumerate(inst.stages or (inst.lattice,)):
            verdicts = {"semimodular": is_semimodular(L), "slim": is_slim(L),
                        "slim_two_chains": is_slim_two_chains(L),
                        "upper_covers": upper_cover_count_ok(L)}
            if not all(verdicts.values()):
                bad.append({"stage": i, **verdicts})
        return CheckRecord(inst.ident, None, "closure", not bad,
                           {"stages": len(inst.stages or (inst.lattice,)), "bad": bad})
    yield _guarded(inst, None, "closure", body)


# extensions of congruences of L -----------------------------------------------------

def _lifted_nodes(inst: Instance, ctx: ForkContext) -> list[Partition]:
    """con in L[S] of each Ji representative of L."""
    e, K = ctx.embed, ctx.lattice
    return [principal_congruence(K, e[p.bottom], e[p.top]) for p in inst.order.reps]


def check_theorem1(inst: Instance, ji_limit: int = 12) -> Iterator[CheckRecord]:
    """Both explicit extensions against the least extension, over all of Con L.

    The least extension of a join of Ji nodes is the join of their lifted
    principal congruences (it is generated by their representatives), which
    is how it is computed for the bulk of the congruences; for each square
    the top and a middle congruence are also closed directly as a check.
    """
    order = inst.order
    if len(order) > ji_limit:
        return
    cons = all_congruences(inst.lattice, order)
    member = [[node <= alpha for node in order.nodes] for alpha in cons]
    for S in inst.squares():
        def body(S=S):
            ctx = inst.fork(S)
            K, e = ctx.lattice, ctx.embed
            lifted = _lifted_nodes(inst, ctx)
            counts = {"one": 0, "zero": 0, "extends": 0, "no_extension": 0}
            witness = {}
            ok = True
            for idx, alpha in enumerate(cons):
                parts = [lifted[i] for i, inside in enumerate(member[idx]) if inside]
                bar = parts[0].join(*parts[1:]) if parts else Partition.identity(K.n)
                if idx in (len(cons) - 1, len(cons) // 2):
                    direct, _ = generated_in_extension(alpha, K, e)
                    if direct != bar:
                        raise AssertionError("least extension via Ji nodes differs from the closure")
                r = restrict(alpha, list(S.elements))
                if r.is_total() or r.is_identity():
                    kind = "one" if r.is_total() else "zero"
                    P = (extend_one if kind == "one" else extend_zero)(alpha, ctx, verify=False)
                    good = (is_congruence(K, P) and restrict(P, e) == Partition(alpha.labels)
                            and P == bar)
                    counts[kind] += 1
                    if not good and ok:
                        ok = False
                        witness = {"alpha": alpha.serialize(), "constructed": P.serialize(),
                                   "least_extension": bar.serialize()}
                else:
                    extendable = restrict(bar, e) == Partition(alpha.labels)
                    counts["extends" if extendable else "no_extension"] += 1
                    if not extendable and "non_extending" not in witness:
                        witness["non_extending"] = alpha.serialize()
            return CheckRecord(inst.ident, S.elements, "1", ok, counts, witness)
        yield _guarded(inst, S, "1", body)


def extends_search(inst: Instance) -> tuple[tuple | None, tuple | None]:
    """Find (square, alpha) pairs with nontrivial restriction to the square
    that do and that do not extend, using :func:`extends` directly."""
    yes = no = None
    if len(inst.order) > 12:
        return yes, no
    for alpha in all_congruences(inst.lattice, inst.order):
        for S in inst.squares():
            r = restrict(alpha, list(S.elements))
            if r.is_total() or r.is_identity():
                continue
            ok, _ = extends(alpha, inst.fork(S))
            if ok and yes is None:
                yes = (S.elements, alpha)
            if not ok and no is None:
                no = (S.elements, alpha)
            if yes and no:
                return yes, no
    return yes, no


# wide squares -----------------------------------------------------------------------

def check_theorem2(inst: Instance) -> Iterator[CheckRecord]:
    """gamma against the least extension of con_L(t, a), a the third cover.

    The detail also reports the variant generated by the side of the square
    next to a, and both S7 witnesses.
    """
    for S in inst.squares(WIDE):
        def body(S=S):
            rep = wide_square_gamma(inst.fork(S))
            detail = {"third": rep.generator[1], "side": rep.side, "near": rep.near,
                      "equals_via_third": rep.equals_via_third,
                      "equals_via_near": rep.generated_by_L,
                      "equals_near_bar": rep.equals_near_bar,
                      "upper_witness": rep.upper_witness, "lower_witness": rep.lower_witness}
            witness = {} if rep.equals_via_third else {
                "gamma": rep.gamma.serialize(), "via_third": rep.via_third.serialize()}
            return CheckRecord(inst.ident, S.elements, "2", rep.equals_via_third, detail, witness)
        yield _guarded(inst, S, "2", body)


# Ji order of L[S] ----------------------------------------------------------------------

def check_theorem3(inst: Instance) -> Iterator[CheckRecord]:
    for S in inst.squares():
        def body(S=S):
            ctx = inst.fork(S)
            order = inst.fork_order(S)
            if S.kind == TIGHT:
                rep = new_ji_check(ctx, order, inst.order)
                ok = True
            else:
                rep = new_ji_nodes(ctx, order, inst.order)
                ok = rep.new == []
            detail = {"kind": S.kind, "ji_before": len(inst.order), "ji_after": len(order),
                      "new": len(rep.new)}
            return CheckRecord(inst.ident, S.elements, "3", ok, detail)
        yield _guarded(inst, S, "3", body)


def check_theorem4(inst: Instance) -> Iterator[CheckRecord]:
    for S in inst.squares(TIGHT):
        def body(S=S):
            ctx = inst.fork(S)
            order = inst.fork_order(S)
            rep = gamma_upper_covers(ctx, order)
            G = gamma_generators(ctx, order)
            detail = {"covers": len(rep.covers), "generators": len(G),
                      "sides_equal": rep.alpha_bar_l == rep.alpha_bar_r,
                      "sides_comparable": rep.alpha_bar_l <= rep.alpha_bar_r
                      or rep.alpha_bar_r <= rep.alpha_bar_l}
            return CheckRecord(inst.ident, S.elements, "4", True, detail,
                               {"covers": " | ".join(c.serialize().replace("\n", ";")
                                                     for c in rep.covers)})
        yield _guarded(inst, S, "4", body)


# delta and gamma -------------------------------------------------------------------------

def check_delta(inst: Instance) -> Iterator[CheckRecord]:
    for S in inst.squares(TIGHT):
        if has_protrusion(inst.lattice, S):
            continue

        def body(S=S):
            delta = delta_congruence(inst.fork(S))
            return CheckRecord(inst.ident, S.elements, "delta", True,
                               {"blocks": len(delta.nontrivial_blocks())},
                               {"delta": delta.serialize()})
        yield _guarded(inst, S, "delta", body)


def protrusion_census(L: Lattice, S) -> dict[str, int]:
    """Protrusions on the two initial chains and how many are irregular."""
    left, right = initial_chains(L, S)
    found = chain_protrusions(L, left, LEFT, S[3]) + chain_protrusions(L, right, RIGHT, S[3])
    return {"protrusions": len(found),
            "irregular": sum(1 for r in found if not r.meets_next_but_one)}


def check_gamma(inst: Instance) -> Iterator[CheckRecord]:
    for S in inst.squares(TIGHT):
        def body(S=S):
            ctx = inst.fork(S)
            res = gamma_full(ctx, verify=False)
            oracle = principal_congruence(ctx.lattice, ctx.m, ctx.embed[S.t])
            final = res.trace[-1]
            stage_checks: dict[str, list[bool]] = {}
            for st in res.trace[:-1]:
                for key, val in st.checks.items():
                    stage_checks.setdefault(key, []).append(val)
            detail = {
                "stages": len(res.trace),
                "equals_oracle": res.gamma == oracle,
                "final_is_ideal": final.checks["ideal"],
                "via_covers": is_congruence_via_covers(ctx.lattice, res.gamma),
                "intermediate_is_ideal": [st.K == ctx.lattice.ideal(ctx.embed[S.t])
                                          for st in res.trace[:-1]],
                "stage_checks": {k: sum(v) for k, v in stage_checks.items()},
                "stage_count_checked": {k: len(v) for k, v in stage_checks.items()},
                "pi_trivial": res.pi.is_identity(),
                **protrusion_census(inst.lattice, S),
            }
            ok = detail["equals_oracle"] and detail["final_is_ideal"] and detail["via_covers"]
            witness = {} if ok else {"constructed": res.gamma.serialize(),
                                     "oracle": oracle.serialize()}
            return CheckRecord(inst.ident, S.elements, "gamma", ok, detail, witness)
        yield _guarded(inst, S, "gamma", body)


# congruence-engine checks ----------------------------------------------------------------------

def random_interval_partition(L: Lattice, rng: random.Random) -> Partition:
    """An equivalence whose classes are disjoint intervals, drawn at random."""
    labels = list(range(L.n))
    used: set[int] = set()
    for _ in range(rng.randint(1, 4)):
        a = rng.randrange(L.n)
        above = sorted(L.filter(a))
        b = rng.choice(above)
        block = L.interval(a, b)
        if block & used:
            continue
        used |= block
        for x in block:
            labels[x] = a
    return Partition(labels)


def technical_samples(inst: Instance, rng: random.Random, count: int) -> list[Partition]:
    """Random interval partitions, plus random joins of Ji nodes so that
    genuine congruences are well represented."""
    out = []
    nodes = inst.order.nodes
    for i in range(count):
        if i % 2 and nodes:
            picked = rng.sample(nodes, rng.randint(1, min(3, len(nodes))))
            out.append(Partition(picked[0].join(*picked[1:]).labels))
        else:
            out.append(random_interval_partition(inst.lattice, rng))
    return out


def check_technical(inst: Instance, samples: int = 8, seed: int = 0) -> Iterator[CheckRecord]:
    def body():
        rng = random.Random(f"technical:{seed}:{inst.ident}")
        L = inst.lattice
        agree = congruences = 0
        witness = {}
        parts = [P for P in technical_samples(inst, rng, samples) if has_interval_classes(L, P)]
        for P in parts:
            direct = is_congruence(L, P)
            covers = is_congruence_via_covers(L, P)
            congruences += direct
            if direct == covers:
                agree += 1
            elif not witness:
                witness = {"partition": P.serialize(), "direct": str(direct)}
        return CheckRecord(inst.ident, None, "technical", agree == len(parts),
                           {"samples": len(parts), "agree": agree, "congruences": congruences},
                           witness)
    yield _guarded(inst, None, "technical", body)


def check_cproj(inst: Instance, max_size: int = 40) -> Iterator[CheckRecord]:
    L = inst.lattice
    if L.n > max_size:
        return

    def body():
        index = CprojIndex(L)
        bit = {p: 1 << i for i, p in enumerate(index.primes)}
        reach_of = {p: 0 for p in index.primes}
        for p in index.primes:
            for q in index.primes_from(p):
                reach_of[p] |= bit[q]
        pairs = 0
        witness = {}
        for a in range(L.n):
            for b in sorted(L.filter(a)):
                if a == b:
                    continue
                theta = congruence_generated(L, [(a, b)])
                lab = theta.labels
                collapsed = 0
                for p in index.primes:
                    if lab[p.bottom] == lab[p.top]:
                        collapsed |= bit[p]
                inside = L.interval(a, b)
                via = 0
                for p in index.primes:
                    if p.bottom in inside and p.top in inside:
                        via |= reach_of[p]
                pairs += 1
                if collapsed != via and not witness:
                    witness = {"interval": f"{a},{b}", "collapsed": bin(collapsed), "via": bin(via)}
        return CheckRecord(inst.ident, None, "cproj", not witness,
                           {"intervals": pairs, "primes": len(index.primes)}, witness)
    yield _guarded(inst, None, "cproj", body)


def check_jimap(inst: Instance) -> Iterator[CheckRecord]:
    for S in inst.squares():
        def body(S=S):
            rep = ji_comparison(inst.fork(S))
            return CheckRecord(inst.ident, S.elements, "jimap", rep.isotone,
                               {"injective": rep.injective, "embedding": rep.embedding})
        yield _guarded(inst, S, "jimap", body)


CHECKS: dict[str, Callable[[Instance], Iterator[CheckRecord]]] = {
    "closure": check_closure,
    "1": check_theorem1,
    "2": check_theorem2,
    "3": check_theorem3,
    "4": check_theorem4,
    "delta": check_delta,
    "gamma": check_gamma,
    "technical": check_technical,
    "cproj": check_cproj,
    "jimap": check_jimap,
}


# coverage and summaries ---------------------------------------------------------------

@dataclass
class Coverage:
    tight: int = 0
    wide: int = 0
    tight_with_protrusion: int = 0

    @property
    def complete(self) -> bool:
        return self.wide > 0 and self.tight_with_protrusion > 0


def coverage(instances: Iterable[Instance]) -> Coverage:
    cov = Coverage()
    for inst in instances:
        for S in inst.squares():
            if S.kind == WIDE:
                cov.wide += 1
            else:
                cov.tight += 1
                cov.tight_with_protrusion += has_protrusion(inst.lattice, S)
    return cov


# which construction branch a theorem needs the corpus to reach
NEEDS = {"gamma": ("tight_with_protrusion",), "2": ("wide",)}


def coverage_record(instances: list[Instance], theorems: Iterable[str] = THEOREMS) -> CheckRecord:
    """Fails when a requested theorem's construction branch never occurs."""
    cov = coverage(instances)
    counts = {"tight": cov.tight, "wide": cov.wide,
              "tight_with_protrusion": cov.tight_with_protrusion}
    missing = sorted({need for name in theorems for need in NEEDS.get(name, ())
                      if counts[need] == 0})
    return CheckRecord("corpus", None, "coverage", not missing, {**counts, "missing": missing})


def run_checks(instances: list[Instance], theorems: Iterable[str], *,
               coverage: bool = True) -> Iterator[CheckRecord]:
    """Records ordered by theorem, then by instance, then by square."""
    theorems = list(theorems)
    for name in theorems:
        if name not in CHECKS:
            raise KeyError(f"unknown theorem {name!r}")
    if coverage:
        yield coverage_record(instances, theorems)
    for name in theorems:
        for inst in instances:
            yield from CHECKS[name](inst)


@dataclass
class Summary:
    total: int = 0
    passed: int = 0
    by_theorem: dict[str, list[int]] = field(default_factory=dict)

    def add(self, rec: CheckRecord) -> None:
        self.total += 1
        self.passed += rec.passed
        row = self.by_theorem.setdefault(rec.theorem, [0, 0])
        row[0] += rec.passed
        row[1] += 1

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    def lines(self) -> list[str]:
        return [f"{name}: {ok}/{n} pass ({100.0 * ok / n:.1f}%)"
                for name, (ok, n) in self.by_theorem.items()]
