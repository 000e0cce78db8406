"""Command-line interface: synth, dbgen, stats, bench and verify.

Exit codes: 0 ok, 1 verify mismatch, 2 parse or usage error, 3 singular or
non-symplectic input, 4 database missing or too small, 5 greedy abandoned,
6 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .circuit import Circuit, replay
from .gf2 import BitMatrix, NotInvertible, format_matrix, parse_matrix_lines
from .symplectic import NotSymplectic, SpMatrix

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_MATRIX, EXIT_DB, EXIT_ABANDONED, EXIT_GUARD = range(7)


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def read_matrix(path: str) -> tuple[str, BitMatrix]:
    try:
        kind, m = parse_matrix_lines(Path(path).read_text().splitlines())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    if m.rows != m.cols:
        raise CliError(f"{path}: matrix must be square", EXIT_PARSE)
    return kind, (SpMatrix.wrap(m) if kind == "sp" else m)


def read_circuit(path: str, n: int) -> Circuit:
    try:
        return Circuit.from_text(n, Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from None
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def _kind_of(kind: str, arg: str | None) -> str:
    if arg is not None and arg != kind:
        raise CliError(f"--kind {arg} does not match the {kind} matrix header", EXIT_PARSE)
    return kind


# synth ------------------------------------------------------------------------

def cmd_synth(args) -> int:
    from .bench import BenchConfig, run_method
    from .optdb import ClassNotFound
    from .search import Abandoned, SearchExhausted

    kind, a = read_matrix(args.input)
    kind = _kind_of(kind, args.kind)
    n = a.rows // 2 if kind == "sp" else a.rows
    method = args.method or ("volanto" if kind == "sp" else "gauss")
    if method == "optimal":
        if not args.db or not Path(args.db).exists():
            raise CliError("optimal synthesis needs an existing --db file", EXIT_DB)
    # A* has no vector heuristic; it falls back to hsum
    cfg = BenchConfig(heuristic=args.heuristic,
                      astar_heuristic=args.heuristic if args.heuristic != "vector" else "hsum",
                      r=args.r, max_q=args.maxq, max_wait=args.maxwait, order=args.order,
                      mode=args.mode, db_path=args.db)
    if method == "optimal":
        from .optdb import load_db
        db = load_db(args.db)
        if db.kind != kind or db.m != a.rows:
            raise CliError(f"database holds {db.kind} n={db.n}, input is {kind} n={n}", EXIT_DB)
        if db.mode != args.mode:
            print(f"note: database mode is {db.mode}", file=sys.stderr)
    t0 = time.perf_counter()
    try:
        res = run_method(a, kind, method, cfg)
    except (NotInvertible, NotSymplectic) as exc:
        raise CliError(str(exc), EXIT_MATRIX) from None
    except ClassNotFound as exc:
        raise CliError(str(exc.args[0]), EXIT_DB) from None
    except Abandoned as exc:
        raise CliError(f"abandoned after {exc.steps} gates: {exc}", EXIT_ABANDONED) from None
    except SearchExhausted as exc:
        raise CliError(str(exc), EXIT_ABANDONED) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    dt = time.perf_counter() - t0
    full = res.full_circuit()
    text = f"# n={n} kind={kind} method={method}\n" + full.to_text()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"n={n} method={method} gates={res.gate_count()} depth={res.depth()} time={dt:.3f}s",
          file=sys.stderr if not args.output else sys.stdout)
    return EXIT_OK


# verify -----------------------------------------------------------------------

def cmd_verify(args) -> int:
    kind, a = read_matrix(args.matrix)
    n = a.rows // 2 if kind == "sp" else a.rows
    c = read_circuit(args.circuit, n)
    if kind == "gl" and c.is_sp():
        raise CliError("symplectic gates in a circuit for a parity matrix", EXIT_PARSE)
    start = BitMatrix.identity(a.rows)
    try:
        got = replay(c, SpMatrix.wrap(start) if kind == "sp" else start, sp=kind == "sp")
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    if got != a:
        print("mismatch")
        if args.show:
            print(format_matrix(got, kind == "sp"), end="")
        return EXIT_MISMATCH
    print("ok")
    return EXIT_OK


# dbgen / stats --------------------------------------------------------------------

def _stats_rows(db) -> list[tuple[int, int]]:
    from .optdb import class_stats
    return list(enumerate(class_stats(db)))


def _write_csv(path: str | None, header, rows) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            fh.close()


def cmd_dbgen(args) -> int:
    from .optdb import ResourceGuard, check_guard, estimate_memory, generate_db, save_db

    try:
        check_guard(args.n, args.kind, args.allow_large)
    except ResourceGuard as exc:
        raise CliError(str(exc), EXIT_GUARD) from None
    if args.allow_large:
        mb = estimate_memory(args.n, args.kind) / 2 ** 20
        print(f"estimated memory: {mb:.0f} MB", file=sys.stderr)

    def progress(d, new, total):
        if args.verbose:
            print(f"cost {d}: {new} new classes, {total} total", file=sys.stderr)

    t0 = time.perf_counter()
    db = generate_db(args.n, args.kind, args.mode, args.allow_large, progress=progress)
    save_db(db, args.output)
    print(f"{args.kind} n={args.n} mode={args.mode}: {len(db)} classes in "
          f"{time.perf_counter() - t0:.1f}s -> {args.output}", file=sys.stderr)
    _write_csv(args.csv, ["cost", "classes"], _stats_rows(db))
    return EXIT_OK


def cmd_stats(args) -> int:
    from .optdb import heuristic_regression, load_db

    if not Path(args.db).exists():
        raise CliError(f"no database at {args.db}", EXIT_DB)
    try:
        db = load_db(args.db)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_DB) from None
    if args.regress:
        rows = []
        for h in ("hsum", "hprod"):
            R, m, b = heuristic_regression(db, h, args.weighting)
            rows.append((h, f"{R:.4f}", f"{m:.4f}", f"{b:.4f}"))
        _write_csv(args.csv, ["heuristic", "R", "m", "b"], rows)
    else:
        _write_csv(args.csv, ["cost", "classes"], _stats_rows(db))
    return EXIT_OK


# bench ----------------------------------------------------------------------------

def cmd_bench(args) -> int:
    from .bench import BenchConfig, run_bench, to_csv

    methods = args.methods.split(",")
    cfg = BenchConfig(heuristic=args.heuristic, astar_heuristic=args.astar_heuristic, r=args.r,
                      max_q=args.maxq, max_wait=args.maxwait, order=args.order,
                      mode=args.mode, baseline=args.baseline, db_path=args.db, timing=not args.no_timing)
    ns = [int(x) for x in args.n.split(",")]
    try:
        recs = run_bench(ns, args.kind, args.samples, args.seed, methods, cfg,
                         exhaustive=args.exhaustive, jobs=args.jobs)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    text = to_csv(recs)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# parser ---------------------------------------------------------------------------

def _search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("count", "depth"), default="count")
    p.add_argument("--r", type=float, default=3.0, help="A* heuristic weight")
    p.add_argument("--maxq", type=int, default=None,
                   help="A* queue bound (default 100 below 16 qubits, else 10; 0 = unbounded)")
    p.add_argument("--maxwait", type=int, default=10, help="greedy patience in gates")
    p.add_argument("--order", choices=("asc", "desc"), default="asc",
                   help="sort order of the greedy vector heuristic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cliffsynth", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("synth", help="synthesize a circuit for a matrix file")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--method", choices=("gauss", "volanto", "greedy", "astar", "optimal"))
    p.add_argument("--heuristic", choices=("vector", "hsum", "hprod"), default="vector")
    p.add_argument("--kind", choices=("gl", "sp"))
    p.add_argument("--db")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for symmetry with bench")
    _search_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check that a circuit produces a matrix")
    p.add_argument("matrix")
    p.add_argument("circuit")
    p.add_argument("--show", action="store_true", help="print the replayed matrix on mismatch")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dbgen", help="generate an equivalence-class database")
    p.add_argument("n", type=int)
    p.add_argument("--kind", choices=("gl", "sp"), default="gl")
    p.add_argument("--mode", choices=("count", "depth"), default="count")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--csv", help="write the per-cost histogram here (default stdout)")
    p.add_argument("--allow-large", action="store_true", help="lift the default size guard")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_dbgen)

    p = sub.add_parser("stats", help="class histogram or heuristic regression of a database")
    p.add_argument("db")
    p.add_argument("--csv")
    p.add_argument("--regress", action="store_true")
    p.add_argument("--weighting", choices=("class", "element"), default="class")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="benchmark methods on random instances")
    p.add_argument("--n", required=True, help="comma-separated qubit counts")
    p.add_argument("--kind", choices=("gl", "sp"), default="gl")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default="greedy")
    p.add_argument("--heuristic", choices=("vector", "hsum", "hprod"), default="vector",
                   help="greedy heuristic")
    p.add_argument("--astar-heuristic", choices=("hsum", "hprod"), default="hsum")
    p.add_argument("--baseline", choices=("gauss", "volanto", "greedy", "astar", "optimal"))
    p.add_argument("--db")
    p.add_argument("--exhaustive", action="store_true", help="every GL(n,2) element (n <= 4)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="write 0 wall times for diffable output")
    p.add_argument("-o", "--output")
    _search_flags(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
