"""Greedy and A* synthesis for parity (GL) and symplectic (Sp) matrices."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .baseline import SynthResult
from .circuit import CNOT, TV_LABELS, Circuit, Gate, replay
from .gf2 import BitMatrix, NotInvertible, inverse, transpose
from .symplectic import NotSymplectic, SpMatrix, is_symplectic, rank_mask

HEURISTICS = {"vector": 0, "hsum": 1, "hprod": 2}


class Abandoned(RuntimeError):
    """Greedy search stopped improving for more than ``maxWait`` gates."""

    def __init__(self, msg: str, steps: int):
        super().__init__(msg)
        self.steps = steps


class SearchExhausted(RuntimeError):
    """A* emptied its queue without reaching a terminal matrix."""


@dataclass
class GreedyConfig:
    heuristic: str = "vector"
    min_depth: bool = False
    max_wait: int = 10
    order: str = "asc"  # ascending-lex; descending traps at large n
    max_steps: int | None = None

    def __post_init__(self):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"heuristic must be one of {sorted(HEURISTICS)}")
        if self.max_wait < 1:
            raise ValueError("maxWait must be at least 1")
        if self.order not in ("desc", "asc"):
            raise ValueError("order must be 'desc' or 'asc'")


@dataclass
class AstarConfig:
    heuristic: str = "hsum"
    r: float = 3.0
    max_q: int | None = None  # None picks 100 for n < 16, else 10; 0 means unbounded
    min_depth: bool = False
    all_options: bool = False

    def __post_init__(self):
        if self.heuristic not in ("hsum", "hprod"):
            raise ValueError("A* heuristic must be 'hsum' or 'hprod'")
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.max_q is not None and self.max_q < 0:
            raise ValueError("maxQ must be non-negative")

    def queue_limit(self, n: int) -> int:
        if self.max_q is None:
            return 100 if n < 16 else 10
        return self.max_q


# state conversion --------------------------------------------------------------

def _is_sp(m: BitMatrix, kind: str | None) -> bool:
    if kind is not None:
        return kind == "sp"
    return isinstance(m, SpMatrix)


def gl_state(a: BitMatrix):
    n = a.rows
    if n > 64:
        raise ValueError("kernels support n <= 64")
    try:
        inv = inverse(a)
    except NotInvertible:
        raise
    cols = np.array(transpose(a).row_ints(), dtype=np.uint64)
    return cols, np.array(inv.row_ints(), dtype=np.uint64)


def sp_state(a: BitMatrix):
    n = a.rows // 2
    if n > 64:
        raise ValueError("kernels support n <= 64")
    mask = (1 << n) - 1
    cols = transpose(a).row_ints()
    X = np.array([c & mask for c in cols], dtype=np.uint64)
    Z = np.array([c >> n for c in cols], dtype=np.uint64)
    return X, Z


def _validate(m: BitMatrix, sp: bool):
    if m.rows != m.cols:
        raise ValueError("synthesis needs a square matrix")
    if sp:
        if m.rows % 2 or not is_symplectic(m):
            raise NotSymplectic("A·Ω·Aᵀ ≠ Ω")
        return SpMatrix.wrap(m)
    return m


def _tv_gate(i: int, j: int, lab: int) -> Gate:
    return Gate("TV", (int(i), int(j)), TV_LABELS[int(lab)])


def _finish(m: BitMatrix, reduction: list[Gate], sp: bool, method: str) -> SynthResult:
    n = m.rows // 2 if sp else m.rows
    term = replay(reduction, m, sp=sp)
    circ = Circuit(n, list(reversed(reduction)))
    res = SynthResult(term, circ, method=method)
    if sp:
        from .symplectic import terminal_decompose
        res.sqcs = list(enumerate(terminal_decompose(term)[1]))
    return res


# greedy -------------------------------------------------------------------------

def greedy_synth(m: BitMatrix, cfg: GreedyConfig | None = None, kind: str | None = None) -> SynthResult:
    """Greedy reduction; raises Abandoned when trapped in a local minimum."""
    cfg = cfg or GreedyConfig()
    sp = _is_sp(m, kind)
    m = _validate(m, sp)
    heur = HEURISTICS[cfg.heuristic]
    desc = cfg.order == "desc"
    if sp:
        n = m.n
        steps = cfg.max_steps or 20 * n * n + 100
        X, Z = sp_state(m)
        ops, status, _, _ = K.sp_greedy(X, Z, n, heur, desc, cfg.min_depth, cfg.max_wait, steps)
        red = [_tv_gate(*o) for o in ops]
    else:
        n = m.rows
        steps = cfg.max_steps or 20 * n * n + 100
        cols, inv = gl_state(m)
        ops, status, _, _ = K.gl_greedy(cols, inv, n, heur, desc, cfg.min_depth, cfg.max_wait, steps)
        red = [CNOT(int(i), int(j)) for i, j in ops]
    if status == 1:
        raise Abandoned(f"no improvement for {cfg.max_wait} gates", len(red))
    if status == 2:
        raise Abandoned("step limit reached without terminal form", len(red))
    return _finish(m, red, sp, "greedy")


# A* ---------------------------------------------------------------------------------

def astar_synth(m: BitMatrix, cfg: AstarConfig | None = None, kind: str | None = None) -> SynthResult:
    """Best-first search on g + r·H with a bounded priority queue.

    Nodes are keyed by raw matrix bytes.  A state is queued again only if it is
    reached with a strictly smaller g than any expanded or queued copy, which
    keeps unbounded runs optimal under an admissible heuristic.  Nodes evicted
    by the queue bound are forgotten.  The goal test happens when a child is
    generated.
    """
    cfg = cfg or AstarConfig()
    sp = _is_sp(m, kind)
    m = _validate(m, sp)
    heur = HEURISTICS[cfg.heuristic]
    if sp:
        n = m.n
        s0 = sp_state(m)
        h0 = K.sp_summary(s0[0], s0[1], n, heur)[0]
        expand = lambda st: K.sp_expand(st[0], st[1], n, heur, cfg.all_options)
    else:
        n = m.rows
        s0 = gl_state(m)
        expand = lambda st: K.gl_expand(st[0], st[1], n, heur, cfg.all_options)
        h0 = _gl_h(s0, n, heur)
    limit = cfg.queue_limit(n)
    if h0 < K.TOL:
        return _finish(m, [], sp, "astar")
    key_of = (lambda st: st[0].tobytes() + st[1].tobytes()) if sp else (lambda st: st[0].tobytes())
    mk = (lambda o: _tv_gate(*o)) if sp else (lambda o: CNOT(*o))
    # expanded nodes form a tree of (parent, op); open nodes live only while queued
    tree_parent = [-1]
    tree_op: list = [None]
    closed = {key_of(s0): 0}
    open_g: dict[bytes, int] = {}
    nodes = {0: (s0, np.full(n, -1, dtype=np.int64), -1, None, 0)}
    heap = [(cfg.r * h0, 0, 0)]
    nid = 1

    def path_to(tid: int, last_op) -> list[Gate]:
        path = [mk(last_op)]
        while tid > 0:
            path.append(mk(tree_op[tid]))
            tid = tree_parent[tid]
        path.reverse()
        return path

    first = True
    while heap:
        _, g, aid = heapq.heappop(heap)
        node = nodes.pop(aid, None)
        if node is None:
            continue
        st, last, par, o, _ = node
        if first:
            tid = 0
            first = False
        else:
            key = key_of(st)
            if open_g.get(key) == g:
                del open_g[key]
            old = closed.get(key)
            if old is not None and old <= g:
                continue
            closed[key] = g
            tid = len(tree_parent)
            tree_parent.append(par)
            tree_op.append(o)
        ops, c1, c2, hv = expand(st)
        if len(hv) == 0:
            continue
        goal = np.flatnonzero(hv < K.TOL)
        if len(goal):
            k = int(goal[0])
            co = tuple(int(x) for x in ops[k]) if sp else (int(ops[k, 0]), int(ops[k, 1]))
            return _finish(m, path_to(tid, co), sp, "astar")
        if cfg.min_depth:
            lay = np.maximum(last[ops[:, 0]], last[ops[:, 1]]) + 1
            gbs = np.maximum(g, lay + 1)
        else:
            lay = None
            gbs = np.full(len(hv), g + 1, dtype=np.int64)
        fs = gbs + cfg.r * hv
        # children in heap order; with a bounded queue only the first `limit`
        # accepted children can survive truncation
        pushed = 0
        for k in np.lexsort((np.arange(len(hv)), gbs, fs)):
            if limit and pushed >= limit:
                break
            gb = int(gbs[k])
            child = (c1[k].copy(), c2[k].copy())
            key = key_of(child)
            old = closed.get(key)
            if old is not None and old <= gb:
                continue
            old = open_g.get(key)
            if old is not None and old <= gb:
                continue
            open_g[key] = gb
            i, j = int(ops[k, 0]), int(ops[k, 1])
            co = (i, j, int(ops[k, 2])) if sp else (i, j)
            if cfg.min_depth:
                nl = last.copy()
                nl[i] = nl[j] = lay[k]
            else:
                nl = last
            nodes[nid] = (child, nl, tid, co, gb)
            heapq.heappush(heap, (float(fs[k]), gb, nid))
            nid += 1
            pushed += 1
        if limit and len(heap) > limit:
            heap = heapq.nsmallest(limit, heap)
            nodes = {e[2]: nodes[e[2]] for e in heap if e[2] in nodes}
            open_g = {key_of(v[0]): v[4] for v in nodes.values()}
    raise SearchExhausted("priority queue emptied before reaching terminal form")


def _gl_h(state, n: int, heur: int) -> float:
    s, _, hs = K.gl_summary(state[0], state[1], n, heur, K.log_table(n))
    return s / (4 * n) if heur == 2 else hs / (2.0 * n) - 1.0


def gate_options(m: BitMatrix, kind: str | None = None) -> list[Gate]:
    """Candidate gates after overlap pruning."""
    sp = _is_sp(m, kind)
    if not sp:
        arr = m.to_array().astype(np.int64)
        ov = arr.T @ arr
        n = m.rows
        return [CNOT(i, j) for i in range(n) for j in range(n) if i != j and ov[i, j]]
    n = m.rows // 2
    rm = rank_mask(m)
    r12 = rm.r12
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            ok = np.any((rm.r2[:, i] & r12[:, j]) | (rm.r1[:, i] & rm.r2[:, j]))
            if ok:
                out.extend(_tv_gate(i, j, lab) for lab in range(9))
    return out
