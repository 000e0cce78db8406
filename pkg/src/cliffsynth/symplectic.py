"""Binary symplectic model of Clifford operators (up to Paulis and phase).

Row vectors are (x|z) with x in bits 0..n-1 and z in bits n..2n-1 of a
Python int.  Gates act on matrices by right multiplication, so the image of
the Pauli u under a symplectic matrix S is the row vector u·S.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import BitMatrix, NotInvertible, mul, transpose

PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
BITS_PAULI = {v: k for k, v in PAULI_BITS.items()}

# The six invertible 2x2 matrices, keyed by name, written row-major 'abcd'.
SQC_NAMES = ("I", "H", "S", "HS", "SH", "HSH")
SQC_TABLE = {"I": "1001", "H": "0110", "S": "1101",
             "HS": "1110", "SH": "0111", "HSH": "1011"}


class NotSymplectic(ValueError):
    """Raised when a matrix fails A·Ω·Aᵀ = Ω."""


def sqc_matrix(name: str) -> np.ndarray:
    s = SQC_TABLE[name]
    return np.array([[int(s[0]), int(s[1])], [int(s[2]), int(s[3])]], dtype=np.uint8)


def sqc_name(m) -> str:
    key = "".join(str(int(v) & 1) for v in np.asarray(m).ravel())
    for name, bits in SQC_TABLE.items():
        if bits == key:
            return name
    raise NotInvertible(f"2x2 matrix {key} is not invertible")


def f2_mul(a, b) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % 2).astype(np.uint8)


def f2_rank(f) -> int:
    f = np.asarray(f)
    if not f.any():
        return 0
    return 2 if (int(f[0, 0]) * int(f[1, 1]) + int(f[0, 1]) * int(f[1, 0])) % 2 else 1


@dataclass(frozen=True)
class PauliVec:
    """Pauli operator (x|z) on n qubits, phases ignored."""

    n: int
    x: tuple
    z: tuple

    @classmethod
    def from_int(cls, n: int, v: int) -> "PauliVec":
        return cls(n, tuple((v >> k) & 1 for k in range(n)),
                   tuple((v >> (n + k)) & 1 for k in range(n)))

    @classmethod
    def from_labels(cls, n: int, labels: dict) -> "PauliVec":
        """``labels`` maps qubit -> 'X'/'Y'/'Z'."""
        x = [0] * n
        z = [0] * n
        for q, p in labels.items():
            x[q], z[q] = PAULI_BITS[p]
        return cls(n, tuple(x), tuple(z))

    def to_int(self) -> int:
        v = 0
        for k in range(self.n):
            v |= (self.x[k] << k) | (self.z[k] << (self.n + k))
        return v

    def support(self) -> list[int]:
        return [k for k in range(self.n) if self.x[k] or self.z[k]]

    def label(self, q: int) -> str:
        return BITS_PAULI[(self.x[q], self.z[q])]

    def __str__(self) -> str:
        parts = [f"{self.label(q)}{q}" for q in self.support()]
        return "*".join(parts) if parts else "I"


def sym_inner(u: int, v: int, n: int) -> int:
    """⟨u,v⟩ = uΩvᵀ, 1 iff the Paulis anticommute."""
    mask = (1 << n) - 1
    return (((u & mask) & (v >> n)) ^ ((u >> n) & (v & mask))).bit_count() & 1


def vec_mul(u: int, m: BitMatrix) -> int:
    """Row vector (as int) times matrix."""
    rows = m.row_ints()
    out = 0
    k = 0
    while u:
        if u & 1:
            out ^= rows[k]
        u >>= 1
        k += 1
    return out


class SpMatrix(BitMatrix):
    """2n x 2n BitMatrix tagged with its qubit count."""

    __slots__ = ()

    @classmethod
    def wrap(cls, m: BitMatrix, check: bool = False) -> "SpMatrix":
        if m.rows != m.cols or m.rows % 2:
            raise NotSymplectic("symplectic matrices are square with even size")
        out = cls(m.rows, m.cols, m.data)
        if check and not is_symplectic(out):
            raise NotSymplectic("A·Ω·Aᵀ ≠ Ω")
        return out

    @property
    def n(self) -> int:
        return self.rows // 2

    def __matmul__(self, other):
        prod = mul(self, other)
        return SpMatrix.wrap(prod) if isinstance(other, SpMatrix) else prod


def omega(n: int) -> BitMatrix:
    if n < 1:
        raise ValueError("n must be positive")
    return BitMatrix.from_rows([1 << ((k + n) % (2 * n)) for k in range(2 * n)], 2 * n)


def is_symplectic(a: BitMatrix) -> bool:
    if a.rows != a.cols:
        raise ValueError("symplectic check needs a square matrix")
    if a.rows % 2:
        raise ValueError("symplectic check needs even dimension")
    n = a.rows // 2
    rows = a.row_ints()
    for i in range(2 * n):
        for j in range(i, 2 * n):
            want = 1 if j == i + n else 0
            if sym_inner(rows[i], rows[j], n) != want:
                return False
    return True


def sp_inverse(a: BitMatrix) -> SpMatrix:
    """A⁻¹ = Ω·Aᵀ·Ω for symplectic A."""
    n = a.rows // 2
    w = omega(n)
    return SpMatrix.wrap(mul(mul(w, transpose(a)), w))


def sp_identity(n: int) -> SpMatrix:
    return SpMatrix.wrap(BitMatrix.identity(2 * n))


def transvection_matrix(v: PauliVec) -> SpMatrix:
    """I + Ω·vᵀ·v: u ↦ u + ⟨u,v⟩v."""
    n = v.n
    vi = v.to_int()
    rows = []
    for k in range(2 * n):
        e = 1 << k
        rows.append(e ^ vi if sym_inner(e, vi, n) else e)
    return SpMatrix.wrap(BitMatrix.from_rows(rows, 2 * n))


def tv_vector(n: int, i: int, j: int, pi: str, pj: str) -> PauliVec:
    return PauliVec.from_labels(n, {i: pi, j: pj})


def two_qubit_transvections(n: int, i: int, j: int) -> list[SpMatrix]:
    if i == j:
        raise ValueError("transvection qubits must differ")
    return [transvection_matrix(tv_vector(n, i, j, a, b))
            for a in "XYZ" for b in "XYZ"]


def sqc_sp(n: int, q: int, name: str) -> SpMatrix:
    """Symplectic matrix of a single-qubit Clifford on qubit q."""
    f = sqc_matrix(name)
    arr = np.eye(2 * n, dtype=np.uint8)
    idx = [q, q + n]
    arr[np.ix_(idx, idx)] = f
    return SpMatrix.wrap(BitMatrix.from_array(arr))


def cnot_sp(n: int, i: int, j: int) -> SpMatrix:
    """Symplectic CNOT_ij: X_i → X_i X_j, Z_j → Z_i Z_j."""
    arr = np.eye(2 * n, dtype=np.uint8)
    arr[i, j] = 1
    arr[n + j, n + i] = 1
    return SpMatrix.wrap(BitMatrix.from_array(arr))


def cz_sp(n: int, i: int, j: int) -> SpMatrix:
    arr = np.eye(2 * n, dtype=np.uint8)
    arr[i, n + j] = 1
    arr[j, n + i] = 1
    return SpMatrix.wrap(BitMatrix.from_array(arr))


def cnot_cz_identities(n: int = 2, swap_check: bool = False) -> bool:
    """Check CZ = S₀S₁·√(Z₀Z₁) and CNOT = S₀·√X₁·√(Z₀X₁) at the symplectic level.

    S³ and √X³ have the same symplectic action as S and √X.  Local factors
    commute with each other; they are applied before the entangling
    transvection.  ``swap_check`` substitutes √(Z₀Z₁) into the CNOT identity.
    """
    s0, s1 = sqc_sp(n, 0, "S"), sqc_sp(n, 1, "S")
    sx1 = transvection_matrix(PauliVec.from_labels(n, {1: "X"}))
    zz = transvection_matrix(tv_vector(n, 0, 1, "Z", "Z"))
    zx = transvection_matrix(tv_vector(n, 0, 1, "Z", "X"))
    ent = zz if swap_check else zx
    ok_cz = mul(mul(s0, s1), zz) == cz_sp(n, 0, 1)
    ok_cx = mul(mul(s0, sx1), ent) == cnot_sp(n, 0, 1)
    return bool(ok_cz and ok_cx)


# F_ij blocks and rank masks ---------------------------------------------

def f_submatrix(a: BitMatrix, i: int, j: int) -> np.ndarray:
    n = a.rows // 2
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("qubit index out of range")
    return np.array([[a[i, j], a[i, j + n]], [a[i + n, j], a[i + n, j + n]]], dtype=np.uint8)


@dataclass(frozen=True)
class RankMask:
    r1: np.ndarray
    r2: np.ndarray

    @property
    def r12(self) -> np.ndarray:
        return self.r1 | self.r2


def rank_mask(a: BitMatrix) -> RankMask:
    n = a.rows // 2
    arr = a.to_array()
    xx, xz = arr[:n, :n], arr[:n, n:]
    zx, zz = arr[n:, :n], arr[n:, n:]
    r2 = (xx & zz) ^ (xz & zx)
    nz = xx | xz | zx | zz
    return RankMask(r1=(nz & (1 - r2)).astype(np.uint8), r2=r2.astype(np.uint8))


def is_terminal_sp(a: BitMatrix) -> bool:
    rm = rank_mask(a)
    return (not rm.r1.any() and bool(np.all(rm.r2.sum(axis=0) == 1))
            and bool(np.all(rm.r2.sum(axis=1) == 1)))


def terminal_decompose(a: BitMatrix) -> tuple[list[int], list[str]]:
    """Split a terminal matrix into (p, sqcs) with a = QPERM(p) then SQC layer.

    Column qubit k is fed by row qubit p[k]; sqcs[k] names F_{p[k],k}.
    """
    n = a.rows // 2
    rm = rank_mask(a)
    if rm.r1.any():
        raise ValueError("matrix is not in terminal form")
    p, names = [], []
    for k in range(n):
        rows = np.flatnonzero(rm.r2[:, k])
        if len(rows) != 1:
            raise ValueError("matrix is not in terminal form")
        p.append(int(rows[0]))
        names.append(sqc_name(f_submatrix(a, int(rows[0]), k)))
    if sorted(p) != list(range(n)):
        raise ValueError("matrix is not in terminal form")
    return p, names


# random sampling --------------------------------------------------------

def _complete_basis(v1: int, v2: int, n: int) -> list[tuple[int, int]]:
    """Symplectic Gram–Schmidt: n-1 hyperbolic pairs orthogonal to (v1, v2)."""

    def project(w, a, b):
        return w ^ (a if sym_inner(w, b, n) else 0) ^ (b if sym_inner(w, a, n) else 0)

    pool = [project(1 << k, v1, v2) for k in range(2 * n)]
    pairs = []
    while len(pairs) < n - 1:
        pool = [w for w in pool if w]
        a = pool.pop(0)
        idx = next(k for k, w in enumerate(pool) if sym_inner(a, w, n))
        b = pool.pop(idx)
        pairs.append((a, b))
        pool = [project(w, a, b) for w in pool]
    return pairs


def _random_sp_rows(n: int, rng: np.random.Generator) -> list[int]:
    def draw() -> int:
        v = 0
        for b in rng.integers(0, 2, size=2 * n):
            v = (v << 1) | int(b)
        return v

    v1 = 0
    while v1 == 0:
        v1 = draw()
    v2 = draw()
    while not sym_inner(v1, v2, n):
        v2 = draw()
    basis = [0] * (2 * n)
    basis[0], basis[n] = v1, v2
    for k, (a, b) in enumerate(_complete_basis(v1, v2, n), start=1):
        basis[k], basis[k + n] = a, b
    if n == 1:
        return basis
    sub = _random_sp_rows(n - 1, rng)
    m = n - 1
    # embed the (n-1)-qubit matrix on qubits 1..n-1, then multiply by the basis
    out = [v1] + [0] * (n - 1) + [v2] + [0] * (n - 1)
    for r in range(2 * m):
        row = sub[r]
        acc = 0
        for c in range(2 * m):
            if (row >> c) & 1:
                full = (c + 1) if c < m else (c - m + 1 + n)
                acc ^= basis[full]
        dest = (r + 1) if r < m else (r - m + 1 + n)
        out[dest] = acc
    return out


def random_sp(n: int, seed=None) -> SpMatrix:
    """Uniform sample from Sp(2n, 2) via the anticommuting-pair recursion."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SpMatrix.wrap(BitMatrix.from_rows(_random_sp_rows(n, rng), 2 * n))


def gl_to_sp(a: BitMatrix) -> SpMatrix:
    """Embed a parity matrix as diag(A, A⁻ᵀ)."""
    from .gf2 import inverse
    n = a.rows
    arr = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    arr[:n, :n] = a.to_array()
    arr[n:, n:] = transpose(inverse(a)).to_array()
    return SpMatrix.wrap(BitMatrix.from_array(arr))


def perm_sp(p: Sequence[int]) -> SpMatrix:
    """Symplectic qubit permutation: column k (and n+k) taken from p[k]."""
    n = len(p)
    arr = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    for k, src in enumerate(p):
        arr[src, k] = 1
        arr[src + n, k + n] = 1
    return SpMatrix.wrap(BitMatrix.from_array(arr))
