from __future__ import annotations

import json
import subprocess
import sys

import pytest

from coxdiag.cli import BUDGET, INVALID, OK, main
from coxdiag.io import load, serialize

from test_planar import I3_PAIR


@pytest.fixture
def i3(tmp_path):
    p = tmp_path / "pair.cxd"
    p.write_text(I3_PAIR)
    return p


def test_validate(i3, tmp_path, capsys):
    assert main(["validate", str(i3)]) == OK
    bad = tmp_path / "bad.cxd"
    bad.write_text("group A 3\nvertex 1 1 2\nvertex 2 1 2\nedge 1.0 2.1\n")
    assert main(["validate", str(bad)]) == INVALID
    assert "line 4" in capsys.readouterr().out


def test_reduce_writes_a_verifiable_trace(i3, tmp_path, capsys):
    tr = tmp_path / "pair.trace"
    assert main(["reduce", str(i3), "--trace", str(tr), "--expand"]) == OK
    assert main(["verify", str(i3), str(tr)]) == OK
    assert "accepted" in capsys.readouterr().out
    data = bytearray(tr.read_bytes())
    data[10] ^= 1
    tr.write_bytes(bytes(data))
    assert main(["verify", str(i3), str(tr)]) == INVALID


def test_generate_reduce_many(tmp_path, capsys):
    out = tmp_path / "gen"
    assert main(["generate", "--group", "BI4", "--count", "4", "--size", "10", "--seed", "3",
                 "--out", str(out)]) == OK
    files = sorted(str(p) for p in out.iterdir())
    assert len(files) == 4 and all(load(f).closed for f in files)
    traces = tmp_path / "traces"
    traces.mkdir()
    assert main(["--jobs", "2", "reduce", *files, "--trace", str(traces)]) == OK
    assert len(list(traces.iterdir())) == 4


def test_budget_exit_code(tmp_path):
    from conftest import cached_corpus
    p = tmp_path / "a.cxd"
    p.write_bytes(serialize(cached_corpus("A", 3, 1, 12, 8)[0]))
    assert main(["--budget", "1", "reduce", str(p)]) == BUDGET


def test_stats_json(i3, capsys):
    assert main(["stats", str(i3), "--json"]) == OK
    data = json.loads(capsys.readouterr().out)
    assert data["V"] == 2 and data["E"] == 6


def test_word(capsys):
    assert main(["word", "--group", "A3", "1", "2", "1", "2", "1", "2"]) == OK
    assert "trivial   True" in capsys.readouterr().out
    assert main(["word", "--group", "A3", "7"]) == INVALID
    assert main(["word", "--group", "Z9", "1"]) == INVALID


def test_render(i3, tmp_path):
    out = tmp_path / "x.svg"
    assert main(["render", str(i3), "--out", str(out)]) == OK
    assert out.read_text().startswith("<svg")


def test_derive_zam(tmp_path, capsys):
    assert main(["derive-zam", "--group", "A3", "--out", str(tmp_path)]) == OK
    assert {p.name for p in tmp_path.iterdir()} == {"zam_a3.1.tpl", "zam_a3.2.tpl", "zam_a3.cert"}
    assert main(["--rules", str(tmp_path), "word", "--group", "A3", "1"]) == OK


def test_missing_file(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "nope.cxd")]) == INVALID


def test_console_script_runs(i3):
    res = subprocess.run([sys.executable, "-m", "coxdiag.cli", "validate", str(i3)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "ok" in res.stdout
