import re

from spsfork.congruence import identity
from spsfork.fork import insert_fork, named_congruences
from spsfork.generators import grid, named
from spsfork.lattice import chain_lattice
from spsfork.render import layout, left_to_right, to_dot, to_tikz
from spsfork.structure import covering_squares


def _edges(dot):
    return re.findall(r"^  (\d+) -> (\d+)(?: \[penwidth.*\])?;$", dot, re.M)


def _balanced(text):
    depth = 0
    for ch in text:
        depth += {"{": 1, "}": -1}.get(ch, 0)
        assert depth >= 0
    return depth == 0


def test_s7_dot_has_every_cover(s7):
    dot = to_dot(s7)
    assert dot.startswith("digraph lattice {") and _balanced(dot)
    assert sorted((int(a), int(b)) for a, b in _edges(dot)) == sorted(s7.covers)
    assert "// group" not in dot


def test_gamma_groups_in_s7(c2sq):
    K, ctx = insert_fork(c2sq, covering_squares(c2sq)[0])
    gamma = named_congruences(ctx).gamma
    dot = to_dot(K, gamma)
    assert len(re.findall(r"// group \d+:", dot)) == 4
    assert dot.count("penwidth=3") == 3
    only = to_dot(K, gamma, all_blocks=False)
    assert len(re.findall(r"// group \d+:", only)) == 3
    tikz = to_tikz(K, gamma)
    assert tikz.count("% group") == 4 and _balanced(tikz)
    assert tikz.count("\\draw") == len(K.covers) and tikz.count("very thick") == 3


def test_chain_is_a_vertical_path():
    L = chain_lattice(5)
    pos = layout(L)
    assert all(x == 0 for x, _ in pos.values())
    assert sorted(y for _, y in pos.values()) == [0, 1, 2, 3, 4]
    assert left_to_right(L) == list(range(4, -1, -1))


def test_left_to_right_follows_the_embedding():
    g = grid(2, 2)
    assert left_to_right(g) == [3, 2, 0, 1]
    pos = layout(g)
    assert pos[2][0] < pos[1][0]


def test_size_mismatch_is_rejected(s7):
    import pytest
    with pytest.raises(ValueError):
        to_dot(s7, identity(grid(2, 2)))


def test_labels_are_used():
    L = named("n5")
    dot = to_dot(L, labels=["o", "a", "b", "c", "t"])
    assert 'label="t"' in dot
