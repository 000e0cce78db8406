"""Gates, circuits, depth layering and frame (permutation / SQC) bookkeeping.

A circuit ``[g1, ..., gk]`` acting on a start matrix ``M`` produces
``M·g1·...·gk``; every gate acts by right multiplication on columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .gf2 import BitMatrix
from .symplectic import (BITS_PAULI, PAULI_BITS, SQC_NAMES, SQC_TABLE, SpMatrix,
                         f2_mul, sqc_matrix, sqc_name, terminal_decompose)

KINDS = ("CNOT", "TV", "SQC", "SWAP", "QPERM")
PAULIS = ("X", "Y", "Z")
TV_LABELS = tuple(a + b for a in PAULIS for b in PAULIS)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        q = tuple(int(v) for v in self.qubits)
        object.__setattr__(self, "qubits", q)
        if self.kind in ("CNOT", "TV", "SWAP"):
            if len(q) != 2 or q[0] == q[1]:
                raise ValueError(f"{self.kind} needs two distinct qubits")
        if self.kind == "TV" and self.label not in TV_LABELS:
            raise ValueError(f"bad transvection label {self.label!r}")
        if self.kind == "SQC":
            if len(q) != 1 or self.label not in SQC_TABLE:
                raise ValueError("SQC needs one qubit and a known name")
        if self.kind == "QPERM" and sorted(q) != list(range(len(q))):
            raise ValueError("QPERM payload must be a permutation")

    @property
    def entangling(self) -> bool:
        return self.kind in ("CNOT", "TV")

    def support(self) -> tuple:
        if self.kind == "QPERM":
            return ()
        return self.qubits

    def __str__(self) -> str:
        if self.kind == "CNOT":
            return f"CNOT {self.qubits[0]} {self.qubits[1]}"
        if self.kind == "TV":
            return f"TV {self.label[0]} {self.label[1]} {self.qubits[0]} {self.qubits[1]}"
        if self.kind == "SQC":
            return f"SQC {self.label} {self.qubits[0]}"
        if self.kind == "SWAP":
            return f"SWAP {self.qubits[0]} {self.qubits[1]}"
        return "QPERM " + " ".join(map(str, self.qubits))


def CNOT(i: int, j: int) -> Gate:
    return Gate("CNOT", (i, j))


def TV(pi: str, pj: str, i: int, j: int) -> Gate:
    return Gate("TV", (i, j), pi + pj)


def SQC(name: str, q: int) -> Gate:
    return Gate("SQC", (q,), name)


def SWAP(i: int, j: int) -> Gate:
    return Gate("SWAP", (i, j))


def QPERM(p: Sequence[int]) -> Gate:
    return Gate("QPERM", tuple(p))


def parse_gate(text: str) -> Gate:
    tok = text.split()
    if not tok:
        raise ValueError("empty gate")
    head = tok[0].upper()
    try:
        if head == "CNOT" and len(tok) == 3:
            return CNOT(int(tok[1]), int(tok[2]))
        if head == "TV" and len(tok) == 5:
            return TV(tok[1].upper(), tok[2].upper(), int(tok[3]), int(tok[4]))
        if head == "SQC" and len(tok) == 3:
            return SQC(tok[1].upper(), int(tok[2]))
        if head == "SWAP" and len(tok) == 3:
            return SWAP(int(tok[1]), int(tok[2]))
        if head == "QPERM" and len(tok) >= 2:
            return QPERM([int(t) for t in tok[1:]])
    except ValueError as exc:
        raise ValueError(f"bad gate line {text!r}: {exc}") from None
    raise ValueError(f"bad gate line {text!r}")


@dataclass
class Circuit:
    n: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        self.ops = list(self.ops)
        for g in self.ops:
            if any(q >= self.n or q < 0 for q in g.qubits):
                raise ValueError(f"gate {g} out of range for {self.n} qubits")
            if g.kind == "QPERM" and len(g.qubits) != self.n:
                raise ValueError("QPERM length differs from qubit count")

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(self.n, self.ops + other.ops)

    def gate_count(self) -> int:
        """Number of two-qubit entangling gates (CNOT / transvection)."""
        return sum(1 for g in self.ops if g.entangling)

    def depth(self) -> int:
        return depth(self)

    def is_sp(self) -> bool:
        return any(g.kind in ("TV", "SQC") for g in self.ops)

    def to_text(self) -> str:
        return "".join(f"{g}\n" for g in self.ops)

    def compact(self) -> str:
        return ";".join(str(g) for g in self.ops)

    @classmethod
    def from_text(cls, n: int, text: str) -> "Circuit":
        lines = text.replace(";", "\n").splitlines()
        ops = [parse_gate(ln) for ln in lines if ln.strip() and not ln.strip().startswith("#")]
        return cls(n, ops)

    def inverse(self) -> "Circuit":
        return Circuit(self.n, [gate_inverse(g) for g in reversed(self.ops)])

    def transpose(self) -> "Circuit":
        return Circuit(self.n, [gate_transpose(g) for g in reversed(self.ops)])


# depth -------------------------------------------------------------------

def _layers(ops) -> list[set]:
    layers: list[set] = []
    for g in ops:
        if g.kind in ("QPERM", "SWAP") or len(g.qubits) <= 1:
            continue
        q = set(g.qubits)
        i = len(layers)
        while i > 0 and not (q & layers[i - 1]):
            i -= 1
        if i == len(layers):
            layers.append(q)
        else:
            layers[i] |= q
    return layers


def depth(c) -> int:
    """Greedy back-scan layering; QPERM, SWAP and single-qubit gates are free."""
    return len(_layers(c.ops if isinstance(c, Circuit) else c))


def last_layer_support(ops: Sequence[Gate]) -> set:
    """Support of the final layer produced by ``depth``'s layering."""
    layers = _layers(ops)
    return layers[-1] if layers else set()


# depth-one layers ----------------------------------------------------------

def qpart(s: Sequence[int], supp: Iterable[int] | None = None) -> list[list[tuple]]:
    """All sets of disjoint pairs from ``s`` whose first pair touches ``supp``.

    Pairs are taken by position in ``s`` and emitted as qubit values.  Only the
    top-level pair is checked against ``supp``; the recursion is unrestricted.
    ``supp=None`` means every qubit.
    """
    s = list(s)
    sup = None if supp is None else set(supp)
    out: list[list[tuple]] = [[]]
    L = len(s)
    for i in range(L - 1):
        for j in range(i + 1, L):
            p = (s[i], s[j])
            if sup is not None and not (sup & set(p)):
                continue
            rest = s[i + 1:j] + s[j + 1:]
            for tail in qpart(rest, None):
                out.append([p] + tail)
    return out


def pair_gates(alphabet: str, i: int, j: int) -> list[Gate]:
    if alphabet == "CNOT":
        return [CNOT(i, j), CNOT(j, i)]
    if alphabet == "TV":
        return [TV(lab[0], lab[1], i, j) for lab in TV_LABELS]
    raise ValueError(f"unknown gate alphabet {alphabet!r}")


def depth_one_layers(n: int, supp: Iterable[int] | None, gate_alphabet: str) -> list[list[Gate]]:
    """Every depth-one layer whose first pair meets ``supp`` (empty layer omitted)."""
    layers = []
    for pairs in qpart(range(n), supp):
        if not pairs:
            continue
        for choice in product(*[pair_gates(gate_alphabet, i, j) for i, j in pairs]):
            layers.append(list(choice))
    return layers


def all_gates(n: int, gate_alphabet: str) -> list[Gate]:
    return [g for i in range(n) for j in range(i + 1, n) for g in pair_gates(gate_alphabet, i, j)]


# transpose / inverse -------------------------------------------------------

def inverse_perm(p: Sequence[int]) -> list[int]:
    inv = [0] * len(p)
    for k, v in enumerate(p):
        inv[v] = k
    return inv


def gate_transpose(g: Gate) -> Gate:
    if g.kind == "CNOT":
        return CNOT(g.qubits[1], g.qubits[0])
    if g.kind == "TV":
        swap = {"X": "Z", "Z": "X", "Y": "Y"}
        return Gate("TV", g.qubits, swap[g.label[0]] + swap[g.label[1]])
    if g.kind == "SQC":
        return SQC(sqc_name(sqc_matrix(g.label).T), g.qubits[0])
    if g.kind == "QPERM":
        return QPERM(inverse_perm(g.qubits))
    return g


def gate_inverse(g: Gate) -> Gate:
    if g.kind == "SQC":
        return SQC({"HS": "SH", "SH": "HS"}.get(g.label, g.label), g.qubits[0])
    if g.kind == "QPERM":
        return QPERM(inverse_perm(g.qubits))
    return g


# replay ---------------------------------------------------------------------

def _tv_int(g: Gate, n: int) -> tuple[list[int], list[int]]:
    """Index lists (support of v, support of Ωvᵀ) for a transvection gate."""
    sup, om = [], []
    for q, p in zip(g.qubits, g.label):
        x, z = PAULI_BITS[p]
        if x:
            sup.append(q)
            om.append(q + n)
        if z:
            sup.append(q + n)
            om.append(q)
    return sup, om


def apply_gate_array(arr: np.ndarray, g: Gate, sp: bool) -> None:
    """In-place right multiplication of a dense uint8 array by gate g."""
    n = arr.shape[1] // 2 if sp else arr.shape[1]
    if g.kind == "CNOT":
        i, j = g.qubits
        arr[:, j] ^= arr[:, i]
        if sp:
            arr[:, n + i] ^= arr[:, n + j]
    elif g.kind == "SWAP":
        i, j = g.qubits
        idx = [i, j] + ([i + n, j + n] if sp else [])
        rev = [j, i] + ([j + n, i + n] if sp else [])
        arr[:, idx] = arr[:, rev]
    elif g.kind == "QPERM":
        p = list(g.qubits)
        if len(p) != n:
            raise ValueError("QPERM length mismatch")
        idx = p + [v + n for v in p] if sp else p
        arr[:, :] = arr[:, idx]
    elif g.kind == "TV":
        if not sp:
            raise ValueError("transvection applied to a parity matrix")
        sup, om = _tv_int(g, n)
        col = np.bitwise_xor.reduce(arr[:, om], axis=1)
        for k in sup:
            arr[:, k] ^= col
    elif g.kind == "SQC":
        if not sp:
            raise ValueError("single-qubit Clifford applied to a parity matrix")
        q = g.qubits[0]
        arr[:, [q, q + n]] = f2_mul(arr[:, [q, q + n]], sqc_matrix(g.label))
    else:
        raise ValueError(f"cannot apply {g.kind}")


def replay(c, start: BitMatrix, sp: bool | None = None) -> BitMatrix:
    """start · g1 · ... · gk."""
    ops = c.ops if isinstance(c, Circuit) else list(c)
    if sp is None:
        sp = isinstance(start, SpMatrix) or any(g.kind in ("TV", "SQC") for g in ops)
    arr = start.to_array()
    if sp and arr.shape[1] % 2:
        raise ValueError("symplectic replay needs an even-sized matrix")
    for g in ops:
        apply_gate_array(arr, g, sp)
    out = BitMatrix.from_array(arr)
    return SpMatrix.wrap(out) if sp else out


# frames ---------------------------------------------------------------------

def _frame_ops(n: int, sp: bool, wmat: np.ndarray | None, perm: list[int]) -> list[Gate]:
    if not sp:
        return [] if perm == list(range(n)) else [QPERM(perm)]
    p, names = terminal_decompose(BitMatrix.from_array(wmat))
    ops = [] if p == list(range(n)) else [QPERM(p)]
    ops += [SQC(name, q) for q, name in enumerate(names) if name != "I"]
    return ops


def frame_to_front(c: Circuit, sp: bool | None = None) -> tuple[list[Gate], list[Gate]]:
    """Split a circuit into (frame ops, entangling ops) with the frame moved first.

    The product is unchanged: replay(frame + core) == replay(c).  Entangling
    gates are conjugated through the accumulated local frame W (qubit
    permutations and single-qubit Cliffords): g·W = W·g'.
    """
    n = c.n
    if sp is None:
        sp = c.is_sp()
    core: list[Gate] = []
    perm = list(range(n))  # GL frame: W = QPERM(perm)
    w = np.eye(2 * n, dtype=np.uint8) if sp else None
    for g in reversed(c.ops):
        if g.kind in ("QPERM", "SWAP", "SQC"):
            if sp:
                tmp = np.eye(2 * n, dtype=np.uint8)
                apply_gate_array(tmp, g, True)
                w = f2_mul(tmp, w)
            else:
                if g.kind == "SQC":
                    raise ValueError("SQC in a parity circuit")
                tmp = np.eye(n, dtype=np.uint8)
                apply_gate_array(tmp, g, False)
                pm = np.zeros((n, n), dtype=np.uint8)
                pm[perm, np.arange(n)] = 1
                prod = f2_mul(tmp, pm)
                perm = [int(np.flatnonzero(prod[:, k])[0]) for k in range(n)]
            continue
        if not sp:
            pinv = inverse_perm(perm)
            core.append(Gate(g.kind, tuple(pinv[q] for q in g.qubits), g.label))
            continue
        if g.kind == "CNOT":
            # CNOT = conjugation-safe only through pure permutations
            p, names = terminal_decompose(BitMatrix.from_array(w))
            if any(nm != "I" for nm in names):
                raise ValueError("cannot move a single-qubit Clifford through a CNOT")
            pinv = inverse_perm(p)
            core.append(CNOT(pinv[g.qubits[0]], pinv[g.qubits[1]]))
            continue
        # transvection: T_v · W = W · T_{vW}
        v = np.zeros(2 * n, dtype=np.uint8)
        for q, pl in zip(g.qubits, g.label):
            v[q], v[q + n] = PAULI_BITS[pl]
        vw = f2_mul(v.reshape(1, -1), w)[0]
        qs = [q for q in range(n) if vw[q] or vw[q + n]]
        labels = "".join(BITS_PAULI[(int(vw[q]), int(vw[q + n]))] for q in qs)
        core.append(Gate("TV", tuple(qs), labels))
    core.reverse()
    return _frame_ops(n, sp, w, perm), core


def commute_perm_to_front(c: Circuit, p: Sequence[int]) -> Circuit:
    """Rewrite ``c + [QPERM p]`` as ``[QPERM p] + relabelled c``."""
    p = list(p)
    if sorted(p) != list(range(c.n)):
        raise ValueError("not a permutation")
    pinv = inverse_perm(p)
    body = []
    for g in c.ops:
        if g.kind == "QPERM":
            # P⁻¹·Q·P as a permutation: column k takes column pinv[q[p[k]]]
            body.append(QPERM([pinv[g.qubits[p[k]]] for k in range(c.n)]))
        else:
            body.append(Gate(g.kind, tuple(pinv[q] for q in g.qubits), g.label))
    head = [] if p == list(range(c.n)) else [QPERM(p)]
    return Circuit(c.n, head + body)


__all__ = [
    "Gate", "Circuit", "CNOT", "TV", "SQC", "SWAP", "QPERM", "TV_LABELS", "SQC_NAMES",
    "parse_gate", "depth", "qpart", "depth_one_layers", "all_gates", "replay",
    "frame_to_front", "commute_perm_to_front", "gate_transpose", "gate_inverse",
    "inverse_perm", "last_layer_support",
]
