from __future__ import annotations

import math

import pytest

from cliffsynth.bench import (HEADER, BenchConfig, BenchRecord, instances, run_bench, saving,
                              summarize, to_csv)
from cliffsynth.gf2 import is_invertible
from cliffsynth.symplectic import is_symplectic


def test_header_schema():
    assert HEADER == ["instance", "n", "kind", "method", "gate_count", "depth", "wall_time",
                      "saving", "status"]


def test_saving():
    assert saving(10, 5) == 50.0
    assert saving(0, 0) == 0.0
    assert saving(8, 10) == -25.0


def test_instances():
    gl = instances(6, "gl", 5, 1)
    assert len(gl) == 5 and all(is_invertible(a) for a in gl)
    assert [a.tobytes() for a in gl] == [a.tobytes() for a in instances(6, "gl", 5, 1)]
    assert all(is_symplectic(a) for a in instances(3, "sp", 5, 1))
    assert len(instances(3, "gl", 0, 0, exhaustive=True)) == 168
    with pytest.raises(ValueError):
        instances(5, "gl", 0, 0, exhaustive=True)


def test_run_bench_records():
    cfg = BenchConfig(timing=False)
    recs = run_bench([4, 6], "gl", 3, 0, ["gauss", "greedy", "astar"], cfg)
    assert len(recs) == 2 * 3 * 3
    assert all(r.status == "ok" for r in recs)
    for r in recs:
        if r.method == "gauss":
            assert r.saving == 0
    ids = [r.instance for r in recs]
    assert ids == sorted(ids)


def test_failures_are_recorded():
    cfg = BenchConfig(heuristic="hsum", timing=False)
    recs = run_bench([48], "gl", 2, 7, ["greedy"], cfg)
    assert all(r.status == "Abandoned" and r.gate_count is None for r in recs)
    s = summarize(recs)
    assert s[(48, "greedy")]["fail_rate"] == 1.0 and math.isnan(s[(48, "greedy")]["mean_saving"])


def test_sp_bench_and_csv():
    recs = run_bench([3], "sp", 4, 2, ["volanto", "greedy"], BenchConfig(timing=False))
    text = to_csv(recs)
    assert text.splitlines()[0] == ",".join(HEADER)
    assert len(text.splitlines()) == 1 + 8
    assert to_csv(run_bench([3], "sp", 4, 2, ["volanto", "greedy"], BenchConfig(timing=False))) == text


def test_parallel_matches_serial():
    cfg = BenchConfig(timing=False)
    a = run_bench([5], "gl", 6, 3, ["greedy"], cfg, jobs=1)
    b = run_bench([5], "gl", 6, 3, ["greedy"], cfg, jobs=2)
    assert to_csv(a) == to_csv(b)


def test_kind_checks():
    with pytest.raises(ValueError):
        run_bench([3], "gl", 1, 0, ["bogus"])
    recs = run_bench([3], "sp", 1, 0, ["gauss"], BenchConfig(timing=False))
    assert recs[0].status == "ValueError"


def test_record_fields():
    r = BenchRecord(0, 3, "gl", "greedy", 2, 2, 0.0, 33.3)
    assert r.status == "ok"
