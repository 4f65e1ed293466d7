"""Text formats: SPSL v1 lattices, congruence block files, corpus manifests."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .congruence import Partition, parse_blocks
from .errors import ParseError
from .lattice import Lattice, build


def serialize(L: Lattice) -> str:
    lines = ["spsl 1", f"n {L.n}"]
    lines += [f"cover {a} {b}" for a, b in sorted(L.covers)]
    lines += [f"up {x} : " + " ".join(map(str, L.upper[x])) for x in range(L.n) if len(L.upper[x]) > 1]
    lines += [f"down {x} : " + " ".join(map(str, L.lower[x])) for x in range(L.n) if len(L.lower[x]) > 1]
    return "\n".join(lines) + "\n"


def _ints(tokens, lineno, n):
    out = []
    for tok in tokens:
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(f"expected an element id, got {tok!r}", lineno) from None
        if n is not None and not 0 <= v < n:
            raise ParseError(f"element {v} outside 0..{n - 1}", lineno)
        out.append(v)
    return out


def parse_raw(text: str):
    """Parse SPSL text into ``(n, covers, up, down)`` without validating order."""
    n = None
    covers: list[tuple[int, int]] = []
    up: dict[int, list[int]] = {}
    down: dict[int, list[int]] = {}
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if not header:
            if head != "spsl" or rest != ["1"]:
                raise ParseError("missing 'spsl 1' header", lineno)
            header = True
            continue
        if head == "n":
            if n is not None or len(rest) != 1:
                raise ParseError("malformed or repeated 'n' line", lineno)
            (n,) = _ints(rest, lineno, None)
            if n < 1:
                raise ParseError("element count must be positive", lineno)
        elif n is None:
            raise ParseError("'n' must precede other directives", lineno)
        elif head == "cover":
            if len(rest) != 2:
                raise ParseError("'cover' takes two ids", lineno)
            a, b = _ints(rest, lineno, n)
            covers.append((a, b))
        elif head in ("up", "down"):
            if len(rest) < 2 or rest[1] != ":":
                raise ParseError(f"expected '{head} <elem> : <ids>'", lineno)
            (x,) = _ints(rest[:1], lineno, n)
            target = up if head == "up" else down
            if x in target:
                raise ParseError(f"repeated '{head}' line for {x}", lineno)
            target[x] = _ints(rest[2:], lineno, n)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if not header:
        raise ParseError("empty input", 1)
    if n is None:
        raise ParseError("missing 'n' line", 1)
    return n, covers, up, down


def parse(text: str) -> Lattice:
    n, covers, up, down = parse_raw(text)
    return build(covers, lower_order=down, upper_order=up, n=n)


def read_lattice(path) -> Lattice:
    return parse(Path(path).read_text(encoding="utf-8"))


def write_lattice(L: Lattice, path) -> None:
    Path(path).write_text(serialize(L), encoding="utf-8")


def read_blocks(path, n: int) -> Partition:
    try:
        return parse_blocks(Path(path).read_text(encoding="utf-8"), n)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


@dataclass(frozen=True)
class ManifestEntry:
    seed: int
    base: str
    forks: int
    n: int
    path: str

    def line(self) -> str:
        return f"{self.seed} {self.base} {self.forks} {self.n} {self.path}"


def read_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    out = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ParseError("manifest lines are 'seed base forks n path'", lineno)
        try:
            seed, forks, n = int(parts[0]), int(parts[2]), int(parts[3])
        except ValueError:
            raise ParseError("seed, forks and n must be integers", lineno) from None
        file = parts[4]
        if not Path(file).is_absolute():
            file = str(path.parent / file)
        out.append(ManifestEntry(seed, parts[1], forks, n, file))
    return out


def write_manifest(entries, path) -> None:
    Path(path).write_text("".join(e.line() + "\n" for e in entries), encoding="utf-8")
