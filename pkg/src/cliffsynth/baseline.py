"""Deterministic O(n²) baselines: modified Gaussian elimination and Volanto."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import CNOT, QPERM, SQC, TV_LABELS, Circuit, Gate, apply_gate_array
from .gf2 import BitMatrix, NotInvertible
from .symplectic import (BITS_PAULI, NotSymplectic, SpMatrix, f2_mul, f2_rank,
                         is_symplectic, terminal_decompose)


@dataclass
class SynthResult:
    """``replay(circuit, terminal)`` reproduces the input matrix."""

    terminal: BitMatrix
    circuit: Circuit
    sqcs: list = field(default_factory=list)
    method: str = ""

    @property
    def sp(self) -> bool:
        return isinstance(self.terminal, SpMatrix)

    def gate_count(self) -> int:
        return self.circuit.gate_count()

    def depth(self) -> int:
        return self.circuit.depth()

    def terminal_ops(self) -> list[Gate]:
        """Gates producing the terminal matrix from the identity."""
        if self.sp:
            p, names = terminal_decompose(self.terminal)
            ops = [] if p == list(range(len(p))) else [QPERM(p)]
            return ops + [SQC(nm, q) for q, nm in enumerate(names) if nm != "I"]
        arr = self.terminal.to_array()
        p = [int(np.flatnonzero(arr[:, k])[0]) for k in range(arr.shape[1])]
        return [] if p == list(range(len(p))) else [QPERM(p)]

    def full_circuit(self) -> Circuit:
        """Circuit from the identity: terminal frame followed by the gates."""
        return Circuit(self.circuit.n, self.terminal_ops() + self.circuit.ops)


def gaussian_synth(a: BitMatrix) -> SynthResult:
    """Column-operation elimination down the rows to a permutation matrix.

    Each row's pivot is the smallest unused column with a 1; every other 1 in
    that row (unused or already-pivoted column) is cleared with CNOT(p, j).
    """
    if a.rows != a.cols:
        raise ValueError("gaussian_synth needs a square matrix")
    n = a.rows
    arr = a.to_array().copy()
    unused = list(range(n))
    ops = []
    for i in range(n):
        cand = [p for p in unused if arr[i, p]]
        if not cand:
            raise NotInvertible("the matrix is not full rank")
        p = min(cand)
        unused.remove(p)
        for j in np.flatnonzero(arr[i]):
            j = int(j)
            if j != p:
                arr[:, j] ^= arr[:, p]
                ops.append(CNOT(p, j))
    ops.reverse()
    return SynthResult(BitMatrix.from_array(arr), Circuit(n, ops), method="gauss")


# Volanto ---------------------------------------------------------------------

def _F(arr: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    return arr[np.ix_([i, i + n], [j, j + n])]


def _tv(pi: tuple, pj: tuple, i: int, j: int) -> Gate:
    return Gate("TV", (i, j), BITS_PAULI[pi] + BITS_PAULI[pj])


def _elim_rk2(fj: np.ndarray, fk: np.ndarray, j: int, k: int) -> Gate:
    """T2 on (j, k): x_j, z_j from the first row of F_ij; x_k, z_k from the second row of F_ik."""
    a, b = int(fj[0, 0]), int(fj[0, 1])
    c, d = int(fk[1, 0]), int(fk[1, 1])
    return _tv((a, b), (c, d), j, k)


def _elim_rk1(fp: np.ndarray, fj: np.ndarray, p: int, j: int) -> Gate:
    """T1 on (p, j) clearing rank-one F_ij using invertible F_ip."""
    inv = np.array([[fp[1, 1], fp[0, 1]], [fp[1, 0], fp[0, 0]]], dtype=np.uint8)
    g = f2_mul(inv, fj)
    b, a = (int(v > 0) for v in g.sum(axis=1))
    c, d = (int(v > 0) for v in g.sum(axis=0))
    return _tv((a, b), (c, d), p, j)


def _tv_search(arr: np.ndarray, n: int, i: int, p: int, j: int) -> Gate:
    """Fallback: the first of the 9 transvections on (p, j) that zeroes F_ij."""
    for lab in TV_LABELS:
        g = Gate("TV", (p, j), lab)
        tmp = arr.copy()
        apply_gate_array(tmp, g, True)
        if not _F(tmp, n, i, j).any() and f2_rank(_F(tmp, n, i, p)) == 2:
            return g
    raise NotSymplectic("no transvection clears the block")


def volanto_synth(a: BitMatrix, fallback: bool = True) -> SynthResult:
    """Reduce a symplectic matrix to terminal form with two-qubit transvections.

    Row qubit i keeps its lowest unused rank-2 column p, pairs off the other
    rank-2 blocks with T2 transvections and clears rank-1 blocks with T1.
    """
    if a.rows != a.cols or a.rows % 2:
        raise NotSymplectic("symplectic matrices are square with even size")
    if not is_symplectic(a):
        raise NotSymplectic("A·Ω·Aᵀ ≠ Ω")
    n = a.rows // 2
    arr = a.to_array().copy()
    unused = list(range(n))
    ops: list[Gate] = []

    def apply(g: Gate):
        apply_gate_array(arr, g, True)
        ops.append(g)

    for i in range(n):
        inv_cols = [j for j in unused if f2_rank(_F(arr, n, i, j)) == 2]
        if len(inv_cols) % 2 == 0:
            raise NotSymplectic("symplectic matrices have an odd number of rank-2 blocks per row")
        p = inv_cols.pop(0)
        unused.remove(p)
        for r in range(len(inv_cols) // 2):
            j, k = inv_cols[2 * r], inv_cols[2 * r + 1]
            apply(_elim_rk2(_F(arr, n, i, j), _F(arr, n, i, k), j, k))
        for j in unused:
            fj = _F(arr, n, i, j)
            if fj.any():
                g = _elim_rk1(_F(arr, n, i, p), fj, p, j)
                tmp = arr.copy()
                apply_gate_array(tmp, g, True)
                if _F(tmp, n, i, j).any() or f2_rank(_F(tmp, n, i, p)) != 2:
                    if not fallback:
                        raise AssertionError("T1 rule failed to clear the block")
                    g = _tv_search(arr, n, i, p, j)
                apply(g)
    ops.reverse()
    term = SpMatrix.wrap(BitMatrix.from_array(arr))
    _, names = terminal_decompose(term)
    return SynthResult(term, Circuit(n, ops), sqcs=list(enumerate(names)), method="volanto")
