from __future__ import annotations

import shutil
import subprocess

import pytest

from cliffsynth.bench import HEADER
from cliffsynth.cli import (EXIT_ABANDONED, EXIT_DB, EXIT_GUARD, EXIT_MATRIX, EXIT_MISMATCH, EXIT_OK,
                            EXIT_PARSE, main)
from cliffsynth.gf2 import format_matrix, random_gl
from cliffsynth.symplectic import random_sp


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def db3(tmp_path_factory):
    p = tmp_path_factory.mktemp("db") / "gl3.db"
    assert main(["dbgen", "3", "-o", str(p), "--csv", str(p) + ".csv"]) == EXIT_OK
    return p


def test_synth_gauss_example(tmp_path):
    m = write(tmp_path, "a.txt", "2\n11\n01\n")
    out = tmp_path / "c.txt"
    assert main(["synth", m, "--method", "gauss", "-o", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.startswith("# n=2 kind=gl method=gauss")
    assert "CNOT 0 1" in text.splitlines()
    assert main(["verify", m, str(out)]) == EXIT_OK


@pytest.mark.parametrize("method", ["gauss", "greedy", "astar"])
def test_identity_gives_empty_circuit(tmp_path, method):
    m = write(tmp_path, "i.txt", "3\n100\n010\n001\n")
    out = tmp_path / "c.txt"
    assert main(["synth", m, "--method", method, "-o", str(out)]) == EXIT_OK
    assert [ln for ln in out.read_text().splitlines() if not ln.startswith("#")] == []


def test_synth_errors(tmp_path):
    sing = write(tmp_path, "s.txt", "2\n11\n11\n")
    assert main(["synth", sing]) == EXIT_MATRIX
    assert main(["synth", write(tmp_path, "b.txt", "2\n1x\n01\n")]) == EXIT_PARSE
    assert main(["synth", str(tmp_path / "missing.txt")]) == EXIT_PARSE
    m = write(tmp_path, "a.txt", "2\n11\n01\n")
    assert main(["synth", m, "--method", "optimal"]) == EXIT_DB
    assert main(["synth", m, "--method", "volanto"]) == EXIT_PARSE
    nonsp = write(tmp_path, "n.txt", "sp 1\n11\n11\n")
    assert main(["synth", nonsp, "--method", "volanto"]) == EXIT_MATRIX
    assert main(["nonsense"]) == EXIT_PARSE


def test_synth_abandoned(tmp_path):
    m = write(tmp_path, "big.txt", format_matrix(random_gl(48, [7, 48, 0])))
    assert main(["synth", m, "--method", "greedy", "--heuristic", "hsum",
                 "-o", str(tmp_path / "c")]) == EXIT_ABANDONED


@pytest.mark.parametrize("kind,methods", [("gl", ["gauss", "greedy", "astar"]),
                                          ("sp", ["volanto", "greedy", "astar"])])
def test_synth_verify_roundtrip(tmp_path, kind, methods):
    for s in range(5):
        a = random_sp(4, s) if kind == "sp" else random_gl(6, s)
        m = write(tmp_path, f"m{s}.txt", format_matrix(a, kind == "sp"))
        for method in methods:
            for mode in ("count", "depth"):
                out = str(tmp_path / f"c{s}{method}{mode}.txt")
                assert main(["synth", m, "--method", method, "--mode", mode, "-o", out]) == EXIT_OK
                assert main(["verify", m, out]) == EXIT_OK


def test_verify_detects_tampering(tmp_path):
    a = random_gl(5, 3)
    m = write(tmp_path, "m.txt", format_matrix(a))
    out = tmp_path / "c.txt"
    assert main(["synth", m, "--method", "gauss", "-o", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    idx = next(i for i, ln in enumerate(lines) if ln.startswith("CNOT"))
    bad = write(tmp_path, "bad.txt", "\n".join(lines[:idx] + lines[idx + 1:]) + "\n")
    assert main(["verify", m, bad]) == EXIT_MISMATCH


def test_verify_wrong_kind(tmp_path):
    m = write(tmp_path, "m.txt", "2\n11\n01\n")
    c = write(tmp_path, "c.txt", "TV X Z 0 1\n")
    assert main(["verify", m, c]) == EXIT_PARSE


def test_dbgen_and_optimal(tmp_path, db3, capsys):
    assert (db3.parent / "gl3.db.csv").read_text().splitlines() == [
        "cost,classes", "0,1", "1,1", "2,2", "3,1"]  # Table 5, n=3
    for s in range(5):
        a = random_gl(3, s)
        m = write(tmp_path, f"m{s}.txt", format_matrix(a))
        out = str(tmp_path / f"c{s}.txt")
        assert main(["synth", m, "--method", "optimal", "--db", str(db3), "-o", out]) == EXIT_OK
        assert main(["verify", m, out]) == EXIT_OK
    m4 = write(tmp_path, "m4.txt", format_matrix(random_gl(4, 0)))
    assert main(["synth", m4, "--method", "optimal", "--db", str(db3)]) == EXIT_DB


def test_dbgen_sp2_total(tmp_path):
    csvp = tmp_path / "h.csv"
    assert main(["dbgen", "2", "--kind", "sp", "-o", str(tmp_path / "s.db"), "--csv", str(csvp)]) == 0
    rows = csvp.read_text().splitlines()[1:]
    assert sum(int(r.split(",")[1]) for r in rows) == 2  # Table 3, n=2


def test_dbgen_guard(tmp_path):
    assert main(["dbgen", "9", "-o", str(tmp_path / "x.db")]) == EXIT_GUARD
    assert main(["dbgen", "5", "--kind", "sp", "-o", str(tmp_path / "x.db")]) == EXIT_GUARD


def test_stats(tmp_path, db3):
    out = tmp_path / "s.csv"
    assert main(["stats", str(db3), "--csv", str(out)]) == EXIT_OK
    assert out.read_text().splitlines()[0] == "cost,classes"
    assert main(["stats", str(db3), "--regress", "--csv", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "heuristic,R,m,b" and lines[1].startswith("hsum,")
    assert main(["stats", str(tmp_path / "none.db")]) == EXIT_DB
    junk = write(tmp_path, "junk.db", "junk")
    assert main(["stats", junk]) == EXIT_DB


def test_bench_csv(tmp_path, db3):
    out = tmp_path / "b.csv"
    args = ["bench", "--n", "3", "--exhaustive", "--methods", "greedy,optimal", "--db", str(db3),
            "--no-timing", "-o", str(out)]
    assert main(args) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(HEADER)
    assert len(lines) == 1 + 2 * 168
    savings = [float(ln.split(",")[7]) for ln in lines[1:] if ",greedy," in ln]
    assert sum(savings) / len(savings) >= 0
    out2 = tmp_path / "b2.csv"
    assert main(args[:-1] + [str(out2)]) == EXIT_OK
    assert out.read_bytes() == out2.read_bytes()


def test_bench_bad_method(tmp_path):
    assert main(["bench", "--n", "3", "--methods", "magic"]) == EXIT_PARSE


@pytest.mark.skipif(shutil.which("cliffsynth") is None, reason="console script not installed")
def test_console_script(tmp_path):
    m = write(tmp_path, "a.txt", "2\n11\n01\n")
    r = subprocess.run(["cliffsynth", "synth", m, "--method", "gauss"], capture_output=True, text=True)
    assert r.returncode == 0 and "CNOT 0 1" in r.stdout
    r = subprocess.run(["cliffsynth", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "bench" in r.stdout
