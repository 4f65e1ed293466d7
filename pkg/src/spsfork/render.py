"""Hasse diagrams as DOT or TikZ text.

Elements are ranked by height and ordered within a rank by a depth-first
walk from the top that always takes the leftmost unvisited lower cover
first, which follows the stored planar embedding.  Congruence blocks can be
highlighted: every block gets a group number and a colour, and cover edges
inside a block are drawn bold.
"""

from __future__ import annotations

from .congruence import Partition
from .lattice import Lattice

PALETTE = ("red", "blue", "green!60!black", "orange", "violet", "teal", "brown", "magenta",
           "olive", "cyan")


def left_to_right(L: Lattice) -> list[int]:
    """Every element once, in the order a leftmost-first walk from the top reaches it."""
    seen, out = set(), []
    stack = [L.top]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        out.append(x)
        stack.extend(reversed(L.lower[x]))
    return out


def layout(L: Lattice) -> dict[int, tuple[float, int]]:
    """(x, y) per element: y is the height, x spreads each rank around 0."""
    order = {x: i for i, x in enumerate(left_to_right(L))}
    ranks: dict[int, list[int]] = {}
    for x in range(L.n):
        ranks.setdefault(L.height[x], []).append(x)
    pos = {}
    for h, row in ranks.items():
        row.sort(key=order.__getitem__)
        for i, x in enumerate(row):
            pos[x] = (i - (len(row) - 1) / 2, h)
    return pos


def _groups(L: Lattice, blocks: Partition | None, all_blocks: bool) -> dict[int, int]:
    if blocks is None:
        return {}
    if blocks.n != L.n:
        raise ValueError("congruence and lattice differ in size")
    chosen = blocks.blocks if all_blocks else blocks.nontrivial_blocks()
    return {x: g for g, block in enumerate(chosen) for x in block}


def to_dot(L: Lattice, blocks: Partition | None = None, *, labels=None,
           all_blocks: bool = True) -> str:
    group = _groups(L, blocks, all_blocks)
    name = (lambda x: str(labels[x])) if labels else str
    pos = layout(L)
    lines = ["digraph lattice {", "  rankdir=BT;", "  node [shape=circle, fixedsize=true, width=0.35];",
             "  edge [dir=none];"]
    if blocks is not None:
        for g in sorted(set(group.values())):
            members = " ".join(str(x) for x in sorted(x for x in group if group[x] == g))
            lines.append(f"  // group {g}: {members}")
    for x in range(L.n):
        attrs = [f'label="{name(x)}"']
        if x in group:
            colour = PALETTE[group[x] % len(PALETTE)].split("!")[0]
            attrs += [f'color="{colour}"', 'penwidth=2']
        lines.append(f"  {x} [{', '.join(attrs)}];")
    ranks: dict[int, list[int]] = {}
    for x in range(L.n):
        ranks.setdefault(pos[x][1], []).append(x)
    for h in sorted(ranks):
        row = sorted(ranks[h], key=lambda x: pos[x][0])
        lines.append("  { rank=same; " + " ".join(f"{x};" for x in row) + " }")
        if len(row) > 1:
            lines.append("  " + " -> ".join(map(str, row)) + " [style=invis];")
    for a, b in sorted(L.covers):
        attrs = ""
        if a in group and group.get(b) == group[a]:
            colour = PALETTE[group[a] % len(PALETTE)].split("!")[0]
            attrs = f' [penwidth=3, color="{colour}"]'
        lines.append(f"  {a} -> {b}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_tikz(L: Lattice, blocks: Partition | None = None, *, labels=None,
            all_blocks: bool = True, scale: float = 1.0) -> str:
    group = _groups(L, blocks, all_blocks)
    name = (lambda x: str(labels[x])) if labels else str
    pos = layout(L)
    lines = [f"\\begin{{tikzpicture}}[scale={scale}]",
             "  \\tikzstyle{elem}=[circle, draw, fill=white, inner sep=1.5pt]"]
    if blocks is not None:
        for g in sorted(set(group.values())):
            members = " ".join(str(x) for x in sorted(x for x in group if group[x] == g))
            lines.append(f"  % group {g}: {members}")
    for a, b in sorted(L.covers):
        style = "thin"
        if a in group and group.get(b) == group[a]:
            style = f"very thick, {PALETTE[group[a] % len(PALETTE)]}"
        (xa, ya), (xb, yb) = pos[a], pos[b]
        lines.append(f"  \\draw[{style}] ({xa:g},{ya}) -- ({xb:g},{yb});")
    for x in range(L.n):
        style = "elem"
        if x in group:
            style += f", {PALETTE[group[x] % len(PALETTE)]}"
        px, py = pos[x]
        lines.append(f"  \\node[{style}] (v{x}) at ({px:g},{py}) {{}};")
        lines.append(f"  \\node[right=2pt] at (v{x}.east) {{\\scriptsize ${name(x)}$}};")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines) + "\n"
