from __future__ import annotations

import itertools

import numpy as np
import pytest

from cliffsynth.gf2 import BitMatrix


def bm(rows) -> BitMatrix:
    return BitMatrix.from_array(np.array(rows, dtype=np.uint8))


def gf2_mul_ref(a, b) -> np.ndarray:
    """Triple-loop product over GF(2); the independent oracle for mul."""
    a, b = np.asarray(a), np.asarray(b)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            s = 0
            for k in range(a.shape[1]):
                s ^= int(a[i, k]) & int(b[k, j])
            out[i, j] = s
    return out


def gl_elements(n: int) -> list[BitMatrix]:
    """Every invertible n x n matrix, found by determinant-free rank test."""
    out = []
    for bits in itertools.product((0, 1), repeat=n * n):
        arr = np.array(bits, dtype=np.uint8).reshape(n, n)
        if _rank_ref(arr) == n:
            out.append(BitMatrix.from_array(arr))
    return out


def _rank_ref(arr) -> int:
    m = np.array(arr, dtype=np.uint8) % 2
    r = 0
    for c in range(m.shape[1]):
        piv = [i for i in range(r, m.shape[0]) if m[i, c]]
        if not piv:
            continue
        m[[r, piv[0]]] = m[[piv[0], r]]
        for i in range(m.shape[0]):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
    return r


_DBS: dict = {}


def get_db(n: int, kind: str, mode: str):
    """Session cache so each database is generated once."""
    from cliffsynth.optdb import generate_db
    key = (n, kind, mode)
    if key not in _DBS:
        _DBS[key] = generate_db(n, kind, mode)
    return _DBS[key]


@pytest.fixture(scope="session")
def dbs():
    return get_db


CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion."""
    def record(num: int, ok: bool, detail: str) -> bool:
        status = "PASS" if ok else "FAIL"
        CRITERIA[num] = (status, detail)
        print(f"criterion {num}: {status} - {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        status, detail = CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {status} - {detail}")
