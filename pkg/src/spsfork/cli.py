"""Command line interface.

Exit status: 0 on success, 1 when a check fails, 2 on usage or input
errors.  Every subcommand accepts ``--config PATH``, a file of
``key = value`` lines that supply defaults for the long options.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .congruence import principal_congruence
from .errors import LatticeError, NotCoveringSquare, NotTight, ParseError, UnknownName
from .fork import insert_fork
from .gamma import gamma_full, is_distributive_square
from .generators import GenSpec, corpus_spec, random_sps
from .harness import (
    THEOREMS,
    Instance,
    Summary,
    corpus_instances,
    manifest_instances,
    run_checks,
)
from .io import ManifestEntry, parse_raw, read_blocks, read_lattice, serialize, write_manifest
from .lattice import build
from .render import to_dot, to_tikz
from .structure import (
    TIGHT,
    covering_squares,
    is_distributive,
    is_patch,
    is_rectangular,
    is_semimodular,
    is_slim,
    is_slim_two_chains,
    upper_cover_count_ok,
)

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _square_arg(L, text: str):
    try:
        ids = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--square expects four comma-separated ids, got {text!r}") from None
    if len(ids) != 4:
        raise UsageError("--square expects exactly four ids: o,a_l,a_r,t")
    for sq in covering_squares(L):
        if sq.elements == ids:
            return sq
    raise UsageError(f"{text} is not a covering square (use 'props' to list them)")


def parse_seeds(text: str) -> list[int]:
    """``0..199`` (inclusive), ``3`` or ``1,4,9``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad seed list {text!r}") from None


def _indent(blocks: str) -> str:
    return "\n".join("  " + line for line in blocks.splitlines())


# subcommands --------------------------------------------------------------------

def cmd_validate(args) -> int:
    n, covers, up, down = parse_raw(Path(args.file).read_text(encoding="utf-8"))
    print(f"parse: ok ({n} elements, {len(covers)} covers)")
    try:
        L = build(covers, lower_order=down, upper_order=up, n=n)
    except LatticeError as exc:
        print(f"lattice: FAIL {type(exc).__name__}: {exc}")
        return FAILED
    print("lattice: ok (meet and join total, cover relation reduced, unique bottom and top)")
    print(f"embedding: {'ok' if L.embedded else 'missing'}")
    return OK if L.embedded else FAILED


def cmd_props(args) -> int:
    L = read_lattice(args.file)
    squares = covering_squares(L)
    semimodular = is_semimodular(L)
    rows = [("elements", L.n), ("covers", len(L.covers)),
            ("semimodular", semimodular), ("slim", is_slim(L)),
            ("slim_two_chains", is_slim_two_chains(L) if semimodular else "n/a"),
            ("upper_covers_at_most_two", upper_cover_count_ok(L)),
            ("distributive", is_distributive(L)),
            ("rectangular", is_rectangular(L) if semimodular else "n/a"),
            ("patch", is_patch(L) if semimodular else "n/a")]
    for key, val in rows:
        print(f"{key}: {str(val).lower()}")
    tight = sum(1 for s in squares if s.kind == TIGHT)
    print(f"squares: {len(squares)} ({tight} tight, {len(squares) - tight} wide)")
    for s in squares:
        print(f"  {','.join(map(str, s.elements))} {s.kind}")
    return OK


def cmd_fork(args) -> int:
    L = read_lattice(args.file)
    S = _square_arg(L, args.square)
    K, ctx = insert_fork(L, S)
    text = serialize(K)
    comment = "\n".join("# " + line for line in ctx.describe().splitlines()) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(ctx.describe())
    else:
        sys.stdout.write(text + comment)
    return OK


def cmd_gamma(args) -> int:
    L = read_lattice(args.file)
    S = _square_arg(L, args.square)
    if S.kind != TIGHT:
        raise UsageError("the square is wide; its gamma comes from a congruence of L "
                         "(see 'check --theorem 2')")
    _, ctx = insert_fork(L, S)
    K = ctx.lattice
    oracle = principal_congruence(K, ctx.m, ctx.embed[S.t])
    print(f"square: {','.join(map(str, S.elements))} (tight, distributive ideal: "
          f"{str(is_distributive_square(L, S)).lower()})")
    print(f"fork: {L.n} -> {K.n} elements, m = {ctx.m}")
    status = OK
    if args.mode in ("constructed", "both"):
        res = gamma_full(ctx, verify=False)
        print(f"stages: {len(res.trace)}")
        for st in res.trace:
            prot = "none" if st.protrusion is None else (
                f"{st.protrusion.side} p={st.protrusion.p} k={st.protrusion.k}")
            print(f"  stage {st.stage}: |K|={len(st.K)} protrusion={prot}")
        print("gamma (constructed):")
        print(_indent(res.gamma.serialize()))
        print("pi:")
        print(_indent(res.pi.serialize()))
        if args.mode == "both":
            same = res.gamma == oracle
            print("gamma (closure of m, t):")
            print(_indent(oracle.serialize()))
            print(f"equal: {str(same).lower()}")
            status = OK if same else FAILED
    else:
        print("gamma (closure of m, t):")
        print(_indent(oracle.serialize()))
    return status


def cmd_check(args) -> int:
    if args.corpus:
        instances = manifest_instances(args.corpus)
    elif args.lattice:
        instances = [Instance(Path(p).name, read_lattice(p)) for p in args.lattice]
    else:
        instances = corpus_instances(parse_seeds(args.gen))
    theorems = THEOREMS if args.theorem == "all" else (args.theorem,)
    summary = Summary()
    sink = open(args.records, "w", encoding="utf-8") if args.records else sys.stdout
    failures = []
    try:
        for rec in run_checks(instances, theorems, coverage=not args.no_coverage):
            summary.add(rec)
            sink.write(rec.to_json() + "\n")
            if not rec.passed:
                failures.append(rec)
    finally:
        if args.records:
            sink.close()
    for line in summary.lines():
        print("# " + line)
    for rec in failures[:args.dump]:
        where = "" if rec.square is None else " square " + ",".join(map(str, rec.square))
        print(f"# FAIL {rec.theorem} {rec.lattice}{where}: {rec.detail}")
        for name, blocks in rec.witness.items():
            print(f"#   {name}: " + blocks.replace("\n", " | "))
    print(f"# overall: {summary.passed}/{summary.total} pass")
    return OK if summary.all_passed else FAILED


def cmd_render(args) -> int:
    L = read_lattice(args.file)
    blocks = read_blocks(args.congruence, L.n) if args.congruence else None
    text = (to_dot if args.format == "dot" else to_tikz)(L, blocks)
    _emit(text, args.out)
    return OK


def _file_name(spec: GenSpec) -> str:
    base = spec.base.replace(":", "").replace(",", "x")
    return f"{base}_f{spec.fork_count}_s{spec.seed}.spsl"


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.default_corpus:
        specs = [corpus_spec(s) for s in parse_seeds(args.seeds)]
    else:
        first = args.seed
        specs = [GenSpec(seed=first + i, base=args.base, fork_count=args.forks,
                         square_policy=args.policy) for i in range(args.count)]
    entries = []
    for spec in specs:
        L = random_sps(spec).lattice
        name = _file_name(spec)
        (out / name).write_text(serialize(L), encoding="utf-8")
        entries.append(ManifestEntry(spec.seed, spec.base, spec.fork_count, L.n, name))
    write_manifest(entries, out / "manifest.txt")
    print(f"wrote {len(entries)} lattices and {out / 'manifest.txt'}")
    return OK


# argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spsfork", allow_abbrev=False,
                                     description="Fork extensions of SPS lattices and their congruences.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, allow_abbrev=False)
        p.add_argument("--config", help="file of key = value defaults for long options")
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check lattice axioms and embedding of an SPSL file")
    p.add_argument("file")

    p = add("props", cmd_props, "structural properties and covering squares")
    p.add_argument("file")

    p = add("fork", cmd_fork, "insert a fork into a covering square")
    p.add_argument("file")
    p.add_argument("--square", required=True, help="o,a_l,a_r,t")
    p.add_argument("--out")

    p = add("gamma", cmd_gamma, "con(m, t) of the fork extension, constructed and by closure")
    p.add_argument("file")
    p.add_argument("--square", required=True, help="o,a_l,a_r,t")
    p.add_argument("--mode", choices=("constructed", "oracle", "both"), default="both")

    p = add("check", cmd_check, "run theorem checks over a corpus")
    p.add_argument("--theorem", choices=THEOREMS + ("all",), default="all")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--corpus", help="manifest file")
    src.add_argument("--gen", default="0..199", help="seeds of the default corpus, e.g. 0..199")
    src.add_argument("--lattice", action="append", help="an SPSL file (repeatable)")
    p.add_argument("--records", help="write JSON-lines records here instead of stdout")
    p.add_argument("--dump", type=int, default=5, help="counterexamples to print")
    p.add_argument("--no-coverage", action="store_true",
                   help="do not require the corpus to exercise every construction branch")

    p = add("render", cmd_render, "Hasse diagram as DOT or TikZ")
    p.add_argument("file")
    p.add_argument("--format", choices=("dot", "tikz"), default="dot")
    p.add_argument("--congruence", help="block file to highlight")
    p.add_argument("--out")

    p = add("gen", cmd_gen, "generate random SPS lattices and a manifest")
    p.add_argument("--base", default="c2sq", help="c2sq or grid:m,n")
    p.add_argument("--forks", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--policy", choices=("uniform", "tight"), default="uniform")
    p.add_argument("--default-corpus", action="store_true",
                   help="write the default corpus for --seeds instead")
    p.add_argument("--seeds", default="0..199")
    p.add_argument("--out", required=True)
    return parser


def read_config(path) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _apply_config(parser, argv) -> list[str]:
    """Turn config entries into long options placed before the command line's own."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    extra = []
    for key, val in read_config(argv[i + 1]).items():
        flag = "--" + key.replace("_", "-")
        if f"{flag}" in argv or any(a.startswith(flag + "=") for a in argv):
            continue
        if val.lower() == "true":
            extra.append(flag)
        elif val.lower() != "false":
            extra += [flag, val]
    return argv[:i + 2] + extra + argv[i + 2:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"spsfork: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    try:
        return args.func(args)
    except (UsageError, ParseError, UnknownName, NotCoveringSquare, NotTight, OSError) as exc:
        print(f"spsfork: {exc}", file=sys.stderr)
        return USAGE
    except LatticeError as exc:
        print(f"spsfork: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
