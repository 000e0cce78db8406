"""Benchmark harness: random instances, per-method records and CSV output."""

from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .baseline import gaussian_synth, volanto_synth
from .circuit import replay
from .gf2 import BitMatrix, is_invertible, random_gl
from .search import Abandoned, AstarConfig, GreedyConfig, SearchExhausted, astar_synth, greedy_synth
from .symplectic import SpMatrix, random_sp

METHODS = ("gauss", "volanto", "greedy", "astar", "optimal")


@dataclass
class BenchRecord:
    instance: int
    n: int
    kind: str
    method: str
    gate_count: int | None
    depth: int | None
    wall_time: float
    saving: float | None
    status: str = "ok"


HEADER = [f.name for f in fields(BenchRecord)]


@dataclass
class BenchConfig:
    heuristic: str = "vector"
    astar_heuristic: str = "hsum"
    r: float = 3.0
    max_q: int | None = None
    max_wait: int = 10
    order: str = "asc"
    mode: str = "count"
    baseline: str | None = None
    db_path: str | None = None
    timing: bool = True


def instances(n: int, kind: str, samples: int, seed: int, exhaustive: bool = False) -> list[BitMatrix]:
    """Reproducible random instances; ``exhaustive`` lists every GL(n,2) element (n <= 4)."""
    if exhaustive:
        if kind != "gl" or n > 4:
            raise ValueError("exhaustive enumeration is available for GL with n <= 4")
        out = []
        for bits in itertools.product((0, 1), repeat=n * n):
            a = BitMatrix.from_array(np.array(bits, dtype=np.uint8).reshape(n, n))
            if is_invertible(a):
                out.append(a)
        return out
    gen = random_sp if kind == "sp" else random_gl
    return [gen(n, [seed, n, k]) for k in range(samples)]


def saving(baseline: int, count: int) -> float:
    return 0.0 if baseline == 0 else (baseline - count) / baseline * 100.0


_DB_CACHE: dict = {}


def _db(path: str):
    from .optdb import load_db
    if path not in _DB_CACHE:
        _DB_CACHE[path] = load_db(path)
    return _DB_CACHE[path]


def run_method(a: BitMatrix, kind: str, method: str, cfg: BenchConfig):
    """Synthesize with one method; returns the SynthResult."""
    if method == "gauss":
        if kind != "gl":
            raise ValueError("gauss works on parity matrices only")
        return gaussian_synth(a)
    if method == "volanto":
        if kind != "sp":
            raise ValueError("volanto works on symplectic matrices only")
        return volanto_synth(a)
    if method == "greedy":
        g = GreedyConfig(cfg.heuristic, cfg.mode == "depth", cfg.max_wait, cfg.order)
        return greedy_synth(a, g, kind)
    if method == "astar":
        c = AstarConfig(cfg.astar_heuristic, cfg.r, cfg.max_q, cfg.mode == "depth")
        return astar_synth(a, c, kind)
    if method == "optimal":
        from .optdb import optimal_synth
        if cfg.db_path is None:
            raise ValueError("optimal needs a database (--db)")
        return optimal_synth(a, _db(cfg.db_path))
    raise ValueError(f"unknown method {method!r}")


def _one(job) -> list[BenchRecord]:
    idx, a, kind, methods, cfg = job
    n = a.rows // 2 if kind == "sp" else a.rows
    if kind == "sp":
        a = SpMatrix.wrap(a)
    base_method = cfg.baseline or ("volanto" if kind == "sp" else "gauss")
    base = run_method(a, kind, base_method, cfg).gate_count()
    out = []
    for method in methods:
        t0 = time.perf_counter()
        try:
            res = run_method(a, kind, method, cfg)
        except (Abandoned, SearchExhausted, KeyError, ValueError) as exc:
            dt = time.perf_counter() - t0 if cfg.timing else 0.0
            out.append(BenchRecord(idx, n, kind, method, None, None, round(dt, 6), None,
                                   f"{type(exc).__name__}"))
            continue
        dt = time.perf_counter() - t0 if cfg.timing else 0.0
        status = "ok" if replay(res.circuit, res.terminal) == a else "mismatch"
        cnt = res.gate_count()
        out.append(BenchRecord(idx, n, kind, method, cnt, res.depth(), round(dt, 6),
                               round(saving(base, cnt), 4), status))
    return out


def run_bench(ns, kind: str, samples: int, seed: int, methods, cfg: BenchConfig | None = None,
              exhaustive: bool = False, jobs: int = 1) -> list[BenchRecord]:
    """Records in instance order; ``jobs > 1`` uses a process pool."""
    cfg = cfg or BenchConfig()
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    work = []
    idx = 0
    for n in ns:
        for a in instances(n, kind, samples, seed, exhaustive):
            work.append((idx, a, kind, list(methods), cfg))
            idx += 1
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_one, work, chunksize=4))
    else:
        parts = [_one(w) for w in work]
    return [r for part in parts for r in part]


def to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow(["" if v is None else v for v in astuple(r)])
    return buf.getvalue()


def summarize(records: list[BenchRecord]) -> dict:
    """Mean saving and abandonment rate per (n, method)."""
    out: dict = {}
    for r in records:
        d = out.setdefault((r.n, r.method), {"runs": 0, "failed": 0, "savings": []})
        d["runs"] += 1
        if r.status != "ok":
            d["failed"] += 1
        elif r.saving is not None:
            d["savings"].append(r.saving)
    for d in out.values():
        d["mean_saving"] = float(np.mean(d["savings"])) if d["savings"] else float("nan")
        d["fail_rate"] = d["failed"] / d["runs"]
    return out
