"""Breadth-first databases of equivalence classes and optimal synthesis by lookup.

Each row of a database is one class, reached from its parent row by taking
one of the four variants (A, Aᵀ, A⁻¹, A⁻ᵀ) of the parent's representative
and appending one gate (count mode) or one depth-one layer (depth mode).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .baseline import SynthResult
from .canon import cert_min_batch, cert_min_rows, recover_perms, variant_matrix, variants
from .circuit import (Circuit, Gate, all_gates, depth_one_layers, frame_to_front,
                      last_layer_support, replay)
from .gf2 import BitMatrix, NotInvertible, inverse
from .heuristics import scalar
from .symplectic import NotSymplectic, PAULI_BITS, SpMatrix, is_symplectic

MAGIC = b"CLFDB1"
HEADER = struct.Struct("<6sBBBBI")
ROW_DTYPE = np.dtype([("parent", "<u4"), ("op", "<u2"), ("flags", "u1")])
NO_PARENT = 0xFFFFFFFF
F_TRANSP, F_INV = 1, 2
GUARD = {"gl": 6, "sp": 4}
LIMIT = {"gl": 7, "sp": 5}


class ResourceGuard(ValueError):
    """Requested database exceeds the default size guard."""


class ClassNotFound(KeyError):
    """The matrix's class is not in the database."""


# gate encoding -------------------------------------------------------------------

def gate_masks(g: Gate, n: int, sp: bool) -> tuple[int, int]:
    """(test, toggle) masks: row r becomes r ^ toggle when |r & test| is odd."""
    if not sp:
        if g.kind != "CNOT":
            raise ValueError("parity databases use CNOT gates")
        i, j = g.qubits
        return 1 << i, 1 << j
    if g.kind != "TV":
        raise ValueError("symplectic databases use transvections")
    v = 0
    for q, p in zip(g.qubits, g.label):
        x, z = PAULI_BITS[p]
        v |= (x << q) | (z << (q + n))
    mask = (1 << n) - 1
    return ((v & mask) << n) | (v >> n), v


def encode_layers(layers: list[list[Gate]], n: int, sp: bool) -> tuple[np.ndarray, np.ndarray]:
    width = max((len(l) for l in layers), default=1)
    ta = np.zeros((len(layers), width), np.uint64)
    tb = np.zeros((len(layers), width), np.uint64)
    for k, layer in enumerate(layers):
        for s, g in enumerate(layer):
            ta[k, s], tb[k, s] = gate_masks(g, n, sp)
    return ta, tb


@njit(cache=True)
def _parity(x):
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    return x & np.uint64(1)


@njit(cache=True)
def apply_layers(rows, ta, tb, idx):
    """Children rows·layer[idx[k]] for each k."""
    m = rows.shape[0]
    out = np.empty((idx.shape[0], m), np.uint64)
    for k in range(idx.shape[0]):
        L = idx[k]
        for r in range(m):
            x = rows[r]
            for s in range(ta.shape[1]):
                if tb[L, s] != 0 and _parity(x & ta[L, s]):
                    x ^= tb[L, s]
            out[k, r] = x
    return out


# database -------------------------------------------------------------------------

@dataclass
class DbRow:
    parent: int | None
    op: int | None
    transp: bool = False
    inv: bool = False


@dataclass
class TreeDb:
    n: int
    kind: str
    mode: str
    parent: np.ndarray
    op: np.ndarray
    flags: np.ndarray
    level: np.ndarray
    mats: np.ndarray  # representative rows, one per class
    index: dict = field(default_factory=dict)
    supp_rule: str = "any"
    _table: list | None = None

    @property
    def sp(self) -> bool:
        return self.kind == "sp"

    @property
    def m(self) -> int:
        return 2 * self.n if self.sp else self.n

    def __len__(self) -> int:
        return len(self.parent)

    def row(self, i: int) -> DbRow:
        if not 0 <= i < len(self):
            raise IndexError(f"row {i} out of range")
        if i == 0:
            return DbRow(None, None)
        f = int(self.flags[i])
        return DbRow(int(self.parent[i]), int(self.op[i]), bool(f & F_TRANSP), bool(f & F_INV))

    @property
    def table(self) -> list:
        """Op-code table: single gates (count) or depth-one layers (depth)."""
        if self._table is None:
            self._table = op_table(self.n, self.kind, self.mode)
        return self._table

    def matrix(self, i: int) -> BitMatrix:
        if not 0 <= i < len(self):
            raise IndexError(f"row {i} out of range")
        m = BitMatrix.from_rows([int(x) for x in self.mats[i]], self.m)
        return SpMatrix.wrap(m) if self.sp else m

    def lookup(self, a: BitMatrix) -> int:
        words, _, _ = cert_min_rows(_rows_of(a), self.m, self.sp)
        try:
            return self.index[words.tobytes()]
        except KeyError:
            raise ClassNotFound("class not in database (database too small for this input?)") from None


def _rows_of(a: BitMatrix) -> np.ndarray:
    return np.array(a.row_ints(), dtype=np.uint64)


def op_table(n: int, kind: str, mode: str) -> list:
    alphabet = "TV" if kind == "sp" else "CNOT"
    if mode == "count":
        return [[g] for g in all_gates(n, alphabet)]
    if mode == "depth":
        return depth_one_layers(n, None, alphabet)
    raise ValueError("mode must be 'count' or 'depth'")


def _variant_circuit(c: Circuit, t: int) -> Circuit:
    if t & 2:
        c = c.inverse()
    if t & 1:
        c = c.transpose()
    return c


def _allowed(table: list, supp: set | None, rule: str) -> np.ndarray:
    """Indices of layers that can raise the depth after a last layer on ``supp``."""
    if supp is None:
        return np.arange(len(table), dtype=np.int64)
    keep = []
    for k, layer in enumerate(table):
        if rule == "first":
            hit = bool(set(layer[0].qubits) & supp)
        else:
            hit = any(set(g.qubits) & supp for g in layer)
        if hit:
            keep.append(k)
    return np.array(keep, dtype=np.int64)


def check_guard(n: int, kind: str, allow_large: bool = False) -> None:
    if kind not in GUARD:
        raise ValueError("kind must be 'gl' or 'sp'")
    if n < 1:
        raise ValueError("n must be positive")
    if n > LIMIT[kind]:
        raise ResourceGuard(f"{kind} databases are limited to n <= {LIMIT[kind]}")
    if n > GUARD[kind] and not allow_large:
        raise ResourceGuard(f"{kind} n={n} exceeds the default guard n <= {GUARD[kind]}; "
                            "pass allow_large to override")


def estimate_memory(n: int, kind: str) -> int:
    """Rough bytes needed for generation, from the known class totals."""
    totals = {"gl": [1, 2, 5, 27, 284, 11761, 1719491], "sp": [1, 2, 8, 109, 20421]}
    t = totals[kind][n - 1]
    m = 2 * n if kind == "sp" else n
    return t * (8 * m + 8 * (6 * n + 2 if kind == "sp" else 2 * n + 2) + 120)


def generate_db(n: int, kind: str = "gl", mode: str = "count", allow_large: bool = False,
                supp_rule: str = "any", progress=None) -> TreeDb:
    """Breadth-first enumeration of classes ordered by gate count or depth."""
    check_guard(n, kind, allow_large)
    if supp_rule not in ("any", "first"):
        raise ValueError("supp_rule must be 'any' or 'first'")
    sp = kind == "sp"
    m = 2 * n if sp else n
    table = op_table(n, kind, mode)
    ta, tb = encode_layers(table, n, sp)
    ident = np.array([1 << k for k in range(m)], dtype=np.uint64)
    parent, ops, flags, level, mats = [NO_PARENT], [0], [0], [0], [ident]
    words, _, _ = cert_min_rows(ident, m, sp)
    index = {words.tobytes(): 0}
    circuits = [Circuit(n, [])] if mode == "depth" else None
    allowed_cache: dict = {}
    all_idx = np.arange(len(table), dtype=np.int64)
    start, end, d = 0, 1, 0
    while start < end:
        for u in range(start, end):
            var = _all_variants(mats[u], m, sp)
            for t in range(4):
                if mode == "depth":
                    supp = None if u == 0 else frozenset(
                        last_layer_support(_variant_circuit(circuits[u], t).ops))
                    idx = allowed_cache.get(supp)
                    if idx is None:
                        idx = allowed_cache[supp] = _allowed(table, None if supp is None else set(supp),
                                                             supp_rule)
                else:
                    idx = all_idx
                if len(idx) == 0:
                    continue
                kids = apply_layers(var[t], ta, tb, idx)
                certs = cert_min_batch(kids, m, sp)
                for k in range(len(idx)):
                    key = certs[k].tobytes()
                    if key in index:
                        continue
                    index[key] = len(parent)
                    parent.append(u)
                    ops.append(int(idx[k]))
                    flags.append((F_TRANSP if t & 1 else 0) | (F_INV if t & 2 else 0))
                    level.append(d + 1)
                    mats.append(kids[k].copy())
                    if circuits is not None:
                        circuits.append(Circuit(n, _variant_circuit(circuits[u], t).ops + table[idx[k]]))
        start, end, d = end, len(parent), d + 1
        if progress is not None:
            progress(d, end - start, len(parent))
    db = TreeDb(n, kind, mode, np.array(parent, np.uint32), np.array(ops, np.uint16),
                np.array(flags, np.uint8), np.array(level, np.int64), np.array(mats, np.uint64),
                index, supp_rule)
    db._table = table
    return db


def _all_variants(rows: np.ndarray, m: int, sp: bool) -> np.ndarray:
    return variants(rows, m, sp)


def retrieve(db: TreeDb, i: int) -> tuple[BitMatrix, Circuit]:
    """Rebuild the representative of row i and its circuit from the parent links."""
    if not 0 <= i < len(db):
        raise IndexError(f"row {i} out of range")
    chain = []
    node = i
    while node != 0:
        chain.append(node)
        node = int(db.parent[node])
    c = Circuit(db.n, [])
    for node in reversed(chain):
        f = int(db.flags[node])
        t = (1 if f & F_TRANSP else 0) | (2 if f & F_INV else 0)
        c = Circuit(db.n, _variant_circuit(c, t).ops + list(db.table[int(db.op[node])]))
    start = BitMatrix.identity(db.m)
    mat = replay(c, SpMatrix.wrap(start) if db.sp else start, sp=db.sp)
    return mat, c


def _frame_circuit(mat: BitMatrix, n: int, sp: bool) -> list[Gate]:
    return SynthResult(mat, Circuit(n, [])).terminal_ops()


def optimal_synth(a: BitMatrix, db: TreeDb) -> SynthResult:
    """Optimal circuit for ``a`` (gate count or depth, as the database was built)."""
    sp = db.sp
    if a.rows != db.m or a.cols != db.m:
        raise ValueError(f"database holds {db.m}x{db.m} matrices")
    if sp:
        if not is_symplectic(a):
            raise NotSymplectic("A·Ω·Aᵀ ≠ Ω")
        a = SpMatrix.wrap(a)
    else:
        inverse(a)
    words, ta, _ = cert_min_rows(_rows_of(a), db.m, sp)
    try:
        rid = db.index[words.tobytes()]
    except KeyError:
        raise ClassNotFound("class not in database (database too small for this input?)") from None
    b, cb = retrieve(db, rid)
    _, tb, _ = cert_min_rows(_rows_of(b), db.m, sp)
    fa = variant_matrix(a, int(ta), sp)
    fb = variant_matrix(b, int(tb), sp)
    pr, pc = recover_perms(fa, fb, "sp" if sp else "gl")
    # fa = pr · fb · pc, with fb = I · (circuit of b mapped through variant tb)
    body = _variant_circuit(cb, int(tb)).ops
    full = Circuit(db.n, _frame_circuit(pr, db.n, sp) + body + _frame_circuit(pc, db.n, sp))
    full = _variant_circuit(full, int(ta))
    frame, core = frame_to_front(full, sp)
    start = BitMatrix.identity(db.m)
    if sp:
        start = SpMatrix.wrap(start)
    term = replay(frame, start, sp=sp)
    res = SynthResult(term, Circuit(db.n, core), method="optimal")
    if sp:
        from .symplectic import terminal_decompose
        res.sqcs = list(enumerate(terminal_decompose(term)[1]))
    if replay(res.circuit, term, sp=sp) != a:
        raise AssertionError("optimal synthesis failed its replay check")
    return res


# statistics ----------------------------------------------------------------------

def class_stats(db: TreeDb) -> list[int]:
    """Number of classes at each cost 0..max."""
    return np.bincount(db.level).tolist()


def element_weights(db: TreeDb, max_elements: int = 100_000) -> np.ndarray:
    """Group elements per class, by breadth-first enumeration of the whole group."""
    n, sp, m = db.n, db.sp, db.m
    order = _group_order(n, sp)
    if order > max_elements:
        raise ValueError(f"group has {order} elements; per-element weights are limited to {max_elements}")
    gates = op_table(n, db.kind, "count")
    ta, tb = encode_layers(gates, n, sp)
    if sp:
        # single-qubit transvections T_X, T_Z make the generating set complete
        loc_a = [1 << (q + n) for q in range(n)] + [1 << q for q in range(n)]
        loc_b = [1 << q for q in range(n)] + [1 << (q + n) for q in range(n)]
        ta = np.vstack([ta[:, :1], np.array(loc_a, np.uint64).reshape(-1, 1)])
        tb = np.vstack([tb[:, :1], np.array(loc_b, np.uint64).reshape(-1, 1)])
    idx = np.arange(len(ta), dtype=np.int64)
    ident = np.array([1 << k for k in range(m)], dtype=np.uint64)
    seen = {ident.tobytes()}
    frontier = [ident]
    found = [ident]
    while frontier:
        nxt = []
        for rows in frontier:
            kids = apply_layers(rows, ta, tb, idx)
            for k in range(len(kids)):
                key = kids[k].tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(kids[k].copy())
        found.extend(nxt)
        frontier = nxt
    if len(found) != order:
        raise AssertionError("group enumeration incomplete")
    certs = cert_min_batch(np.array(found, np.uint64), m, sp)
    w = np.zeros(len(db), np.int64)
    for k in range(len(certs)):
        w[db.index[certs[k].tobytes()]] += 1
    return w


def _group_order(n: int, sp: bool) -> int:
    if sp:
        out = 2 ** (n * n)
        for k in range(1, n + 1):
            out *= 4 ** k - 1
        return out
    out = 1
    for k in range(n):
        out *= 2 ** n - 2 ** k
    return out


def heuristic_regression(db: TreeDb, heuristic: str = "hsum", weighting: str = "class"):
    """Least-squares fit cost ≈ m·H + b over classes; returns (R, m, b)."""
    if weighting not in ("class", "element"):
        raise ValueError("weighting must be 'class' or 'element'")
    f = scalar(db.kind, heuristic)
    x = np.array([f(db.matrix(i)) for i in range(len(db))], dtype=float)
    y = db.level.astype(float)
    w = np.ones(len(db)) if weighting == "class" else element_weights(db).astype(float)
    if len(db) < 2 or np.var(x) == 0:
        raise ValueError("regression needs at least two distinct heuristic values")
    xm = np.average(x, weights=w)
    ym = np.average(y, weights=w)
    sxx = np.average((x - xm) ** 2, weights=w)
    syy = np.average((y - ym) ** 2, weights=w)
    sxy = np.average((x - xm) * (y - ym), weights=w)
    slope = sxy / sxx
    return float(sxy / np.sqrt(sxx * syy)), float(slope), float(ym - slope * xm)


# persistence ---------------------------------------------------------------------

def save_db(db: TreeDb, path) -> None:
    rows = np.zeros(len(db), ROW_DTYPE)
    rows["parent"] = db.parent
    rows["op"] = db.op
    rows["flags"] = db.flags
    rows["parent"][0] = NO_PARENT
    head = HEADER.pack(MAGIC, 1 if db.sp else 0, 1 if db.mode == "depth" else 0, db.n,
                       1 if db.supp_rule == "first" else 0, len(db))
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(rows.tobytes())


def load_db(path) -> TreeDb:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < HEADER.size:
        raise ValueError("truncated database file")
    magic, kind, mode, n, rule, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError("not a database file")
    rows = np.frombuffer(data, ROW_DTYPE, count=count, offset=HEADER.size)
    kind_s = "sp" if kind else "gl"
    mode_s = "depth" if mode else "count"
    sp = kind_s == "sp"
    m = 2 * n if sp else n
    table = op_table(n, kind_s, mode_s)
    ta, tb = encode_layers(table, n, sp)
    parent = rows["parent"].astype(np.uint32)
    flags = rows["flags"].astype(np.uint8)
    ops = rows["op"].astype(np.uint16)
    mats = np.zeros((count, m), np.uint64)
    level = np.zeros(count, np.int64)
    mats[0] = [1 << k for k in range(m)]
    for i in range(1, count):
        p = int(parent[i])
        if p >= i:
            raise ValueError("corrupt database: parent after child")
        f = int(flags[i])
        t = (1 if f & F_TRANSP else 0) | (2 if f & F_INV else 0)
        var = _all_variants(mats[p], m, sp)
        mats[i] = apply_layers(var[t], ta, tb, np.array([int(ops[i])], np.int64))[0]
        level[i] = level[p] + 1
    certs = cert_min_batch(mats, m, sp)
    index = {certs[k].tobytes(): k for k in range(count)}
    if len(index) != count:
        raise ValueError("corrupt database: duplicate classes")
    db = TreeDb(n, kind_s, mode_s, parent, ops, flags, level, mats, index,
                "first" if rule else "any")
    db._table = table
    return db


__all__ = ["DbRow", "TreeDb", "generate_db", "retrieve", "optimal_synth", "class_stats",
           "heuristic_regression", "element_weights", "save_db", "load_db", "ResourceGuard",
           "ClassNotFound", "check_guard", "estimate_memory", "op_table"]
