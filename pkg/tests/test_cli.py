import json

import pytest

from spsfork.cli import main, parse_seeds
from spsfork.generators import grid, named
from spsfork.io import read_lattice, serialize

C2SQ = serialize(grid(2, 2))


@pytest.fixture
def files(tmp_path):
    (tmp_path / "c2sq.spsl").write_text(C2SQ)
    (tmp_path / "s7.spsl").write_text(serialize(named("s7")))
    return tmp_path


def test_validate(files, capsys):
    assert main(["validate", str(files / "s7.spsl")]) == 0
    bad = files / "bad.spsl"
    bad.write_text(C2SQ.replace("cover 2 3", "cover 2 3\ncover 0 3"))
    assert main(["validate", str(bad)]) == 1
    assert "NotReduced" in capsys.readouterr().out


def test_missing_file_and_bad_syntax(files):
    assert main(["validate", str(files / "none.spsl")]) == 2
    (files / "junk.spsl").write_text("elements 3\ncover 0 7\n")
    assert main(["validate", str(files / "junk.spsl")]) == 2
    assert main(["frobnicate"]) == 2


def test_props(files, capsys):
    assert main(["props", str(files / "s7.spsl")]) == 0
    out = capsys.readouterr().out
    assert "tight" in out and "wide" in out


def test_fork_writes_s7(files):
    out = files / "k.spsl"
    assert main(["fork", str(files / "c2sq.spsl"), "--square", "0,2,1,3", "--out", str(out)]) == 0
    assert read_lattice(out).n == 7
    assert main(["fork", str(files / "c2sq.spsl"), "--square", "0,1,2,3"]) == 2


def test_gamma_modes(files, capsys):
    args = ["gamma", str(files / "c2sq.spsl"), "--square", "0,2,1,3"]
    assert main(args) == 0
    assert "equal: true" in capsys.readouterr().out
    assert main(args + ["--mode", "oracle"]) == 0
    assert main(["gamma", str(files / "s7.spsl"), "--square", "1,3,4,6"]) == 2


def test_check_on_files(files, capsys, tmp_path):
    rec = tmp_path / "r.jsonl"
    code = main(["check", "--theorem", "1", "--lattice", str(files / "c2sq.spsl"),
                 "--records", str(rec), "--no-coverage"])
    assert code == 0
    rows = [json.loads(line) for line in rec.read_text().splitlines()]
    assert rows and all(r["verdict"] == "pass" and r["theorem"] == "1" for r in rows)
    assert "# overall:" in capsys.readouterr().out


def test_check_fails_without_coverage(files, capsys):
    # a Boolean square has no wide square, so the wide branch is unexercised
    assert main(["check", "--theorem", "2", "--lattice", str(files / "c2sq.spsl")]) == 1
    first = json.loads(capsys.readouterr().out.splitlines()[0])
    assert first["theorem"] == "coverage" and first["detail"]["missing"] == ["wide"]


def test_render(files, capsys):
    assert main(["render", str(files / "s7.spsl"), "--format", "tikz"]) == 0
    assert "\\begin{tikzpicture}" in capsys.readouterr().out


def test_gen_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["gen", "--default-corpus", "--seeds", "0..9", "--out", str(d)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert len(names) == 11 and "manifest.txt" in names
    assert all((a / n).read_bytes() == (b / n).read_bytes() for n in names)
    assert main(["check", "--theorem", "closure", "--corpus", str(a / "manifest.txt"),
                 "--no-coverage"]) == 0


def test_config_file(files, tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("base = grid:3,3\nforks = 2\ncount = 2\n")
    out = tmp_path / "g"
    assert main(["gen", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "grid3x3_f2_s1.spsl").exists()
    cfg.write_text("colour = blue\n")
    assert main(["gen", "--config", str(cfg), "--out", str(out)]) == 2


def test_parse_seeds():
    assert parse_seeds("0..3") == [0, 1, 2, 3]
    assert parse_seeds("5,7") == [5, 7]
