"""Bit-packed dense matrices over GF(2).

Rows are packed little-endian into 64-bit words: bit ``c % 64`` of word
``c // 64`` holds column ``c``.  Matrices are treated as immutable values;
every operation returns a new matrix.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

WORD = 64


class NotInvertible(ValueError):
    """Raised when a square matrix has rank below its size."""


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


class BitMatrix:
    """Dense GF(2) matrix with bit-packed rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None):
        if rows < 1 or cols < 1:
            raise ValueError("BitMatrix needs at least one row and one column")
        self.rows = rows
        self.cols = cols
        if data is None:
            data = np.zeros((rows, _nwords(cols)), dtype=np.uint64)
        else:
            data = np.array(data, dtype=np.uint64).reshape(rows, _nwords(cols))
            tail = cols % WORD
            if tail:
                data[:, -1] &= np.uint64((1 << tail) - 1)
        data.flags.writeable = False
        self.data = data

    # construction -----------------------------------------------------

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        a = np.asarray(arr, dtype=np.uint8) & 1
        if a.ndim == 1:
            a = a.reshape(1, -1)
        rows, cols = a.shape
        nw = _nwords(cols)
        data = np.zeros((rows, nw), dtype=np.uint64)
        for w in range(nw):
            block = a[:, w * WORD:(w + 1) * WORD].astype(np.uint64)
            shifts = np.arange(block.shape[1], dtype=np.uint64)
            data[:, w] = np.bitwise_or.reduce(block << shifts, axis=1)
        return cls(rows, cols, data)

    @classmethod
    def from_rows(cls, rows: Sequence[int], cols: int) -> "BitMatrix":
        """Build from Python-int row bitmasks (bit c = column c)."""
        nw = _nwords(cols)
        data = np.zeros((len(rows), nw), dtype=np.uint64)
        mask = (1 << WORD) - 1
        for i, r in enumerate(rows):
            for w in range(nw):
                data[i, w] = (r >> (WORD * w)) & mask
        return cls(len(rows), cols, data)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_rows([1 << i for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    # views ------------------------------------------------------------

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for w in range(self.data.shape[1]):
            width = min(WORD, self.cols - w * WORD)
            shifts = np.arange(width, dtype=np.uint64)
            out[:, w * WORD:w * WORD + width] = (
                (self.data[:, w:w + 1] >> shifts) & np.uint64(1)).astype(np.uint8)
        return out

    def row_ints(self) -> list[int]:
        out = []
        for r in self.data:
            v = 0
            for w in range(len(r) - 1, -1, -1):
                v = (v << WORD) | int(r[w])
            out.append(v)
        return out

    def words(self) -> np.ndarray:
        """Single-word row view for matrices with at most 64 columns."""
        if self.cols > WORD:
            raise ValueError("matrix wider than one machine word")
        return self.data[:, 0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij) -> int:
        i, j = ij
        return int((int(self.data[i, j // WORD]) >> (j % WORD)) & 1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitMatrix) and self.shape == other.shape
                and np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mul(self, other)

    def tobytes(self) -> bytes:
        return self.data.tobytes()

    def weight(self) -> int:
        return int(sum(int(x).bit_count() for x in self.data.ravel()))

    def is_permutation(self) -> bool:
        a = self.to_array()
        return (a.shape[0] == a.shape[1] and bool(np.all(a.sum(axis=0) == 1))
                and bool(np.all(a.sum(axis=1) == 1)))

    def __repr__(self) -> str:
        body = "\n".join("".join(map(str, r)) for r in self.to_array())
        return f"BitMatrix({self.rows}x{self.cols})\n{body}"

    def to_text(self) -> str:
        head = f"{self.rows}" if self.rows == self.cols else f"{self.rows} {self.cols}"
        return "\n".join([head] + ["".join(map(str, r)) for r in self.to_array()]) + "\n"


# arithmetic -----------------------------------------------------------

def mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    out = np.zeros((a.rows, b.data.shape[1]), dtype=np.uint64)
    arr = a.to_array()
    for i in range(a.rows):
        ks = np.flatnonzero(arr[i])
        if len(ks):
            out[i] = np.bitwise_xor.reduce(b.data[ks], axis=0)
    return BitMatrix(a.rows, b.cols, out)


def add(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    return BitMatrix(a.rows, a.cols, a.data ^ b.data)


def transpose(a: BitMatrix) -> BitMatrix:
    return BitMatrix.from_array(a.to_array().T)


def _gauss_jordan(rows: list[int], n: int) -> list[int]:
    # rows hold [A | I] with A in the low n bits
    work = [r | (1 << (n + i)) for i, r in enumerate(rows)]
    for c in range(n):
        bit = 1 << c
        piv = next((r for r in range(c, n) if work[r] & bit), None)
        if piv is None:
            raise NotInvertible(f"matrix has rank < {n}")
        work[c], work[piv] = work[piv], work[c]
        pr = work[c]
        for r in range(n):
            if r != c and work[r] & bit:
                work[r] ^= pr
    return [w >> n for w in work]


def inverse(a: BitMatrix) -> BitMatrix:
    if a.rows != a.cols:
        raise ValueError("inverse needs a square matrix")
    return BitMatrix.from_rows(_gauss_jordan(a.row_ints(), a.rows), a.cols)


def rank(a: BitMatrix) -> int:
    work = a.row_ints()
    r = 0
    for c in range(a.cols):
        bit = 1 << c
        piv = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        r += 1
    return r


def is_invertible(a: BitMatrix) -> bool:
    return a.rows == a.cols and rank(a) == a.rows


def col_sums(a: BitMatrix) -> list[int]:
    """Column weights minus one; zero vector exactly for permutation matrices.

    All-zero columns (possible only for singular inputs) give -1.
    """
    return [int(s) - 1 for s in a.to_array().sum(axis=0)]


def apply_cnot(a: BitMatrix, i: int, j: int) -> BitMatrix:
    """Add column ``i`` into column ``j`` (right multiplication by E_ij)."""
    if i == j:
        raise ValueError("CNOT needs distinct qubits")
    if not (0 <= i < a.cols and 0 <= j < a.cols):
        raise IndexError(f"qubit out of range for {a.cols} columns")
    arr = a.to_array()
    arr[:, j] ^= arr[:, i]
    return BitMatrix.from_array(arr)


def elementary(n: int, i: int, j: int) -> BitMatrix:
    arr = np.eye(n, dtype=np.uint8)
    arr[i, j] = 1
    return BitMatrix.from_array(arr)


def permutation_matrix(p: Sequence[int]) -> BitMatrix:
    """Matrix Q with Q[p[k], k] = 1, so column k of M @ Q is column p[k] of M."""
    n = len(p)
    arr = np.zeros((n, n), dtype=np.uint8)
    arr[list(p), np.arange(n)] = 1
    return BitMatrix.from_array(arr)


def random_gl(n: int, seed=None) -> BitMatrix:
    """Uniform sample from GL(n, 2) by rejection."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    while True:
        m = BitMatrix.from_array(rng.integers(0, 2, size=(n, n), dtype=np.uint8))
        if is_invertible(m):
            return m


# text format ------------------------------------------------------------

def parse_matrix_lines(lines: Iterable[str]):
    """Parse the shared text format.

    Returns ``("gl", BitMatrix)`` for an ``n [m]`` header or ``("sp", BitMatrix)``
    for an ``sp n`` header (a 2n x 2n block follows).
    """
    body = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise ValueError("empty matrix file")
    head = body[0].split()
    kind = "gl"
    if head[0].lower() == "sp":
        if len(head) != 2:
            raise ValueError("bad header, expected 'sp n'")
        kind = "sp"
        rows = cols = 2 * int(head[1])
    elif len(head) == 1:
        rows = cols = int(head[0])
    elif len(head) == 2:
        rows, cols = int(head[0]), int(head[1])
    else:
        raise ValueError(f"bad header line: {body[0]!r}")
    data = body[1:]
    if len(data) != rows:
        raise ValueError(f"expected {rows} rows, found {len(data)}")
    arr = []
    for ln in data:
        ln = ln.replace(" ", "")
        if len(ln) != cols or set(ln) - {"0", "1"}:
            raise ValueError(f"bad matrix row: {ln!r}")
        arr.append([int(ch) for ch in ln])
    return kind, BitMatrix.from_array(arr)


def format_matrix(a: BitMatrix, sp: bool = False) -> str:
    if sp:
        rows = ["".join(map(str, r)) for r in a.to_array()]
        return "\n".join([f"sp {a.rows // 2}"] + rows) + "\n"
    return a.to_text()
