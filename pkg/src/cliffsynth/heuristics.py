"""Scalar and vector cost functions for greedy and A* search."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering

import numpy as np

from .gf2 import BitMatrix, inverse, transpose
from .symplectic import NotSymplectic, is_symplectic, rank_mask

ORDERS = ("desc", "asc")


@total_ordering
class HVector:
    """Sorted column-sum vector; entries are ``scaled[k] / denom``."""

    __slots__ = ("scaled", "denom", "order")

    def __init__(self, values, denom: int = 1, order: str = "asc"):
        if order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        self.scaled = tuple(sorted((int(v) for v in values), reverse=(order == "desc")))
        self.denom = int(denom)
        self.order = order

    @property
    def entries(self) -> list[Fraction]:
        return [Fraction(v, self.denom) for v in self.scaled]

    def is_zero(self) -> bool:
        return not any(self.scaled)

    def __eq__(self, other) -> bool:
        return isinstance(other, HVector) and self.scaled == other.scaled

    def __lt__(self, other: "HVector") -> bool:
        return self.scaled < other.scaled

    def __hash__(self) -> int:
        return hash(self.scaled)

    def __len__(self) -> int:
        return len(self.scaled)

    def __repr__(self) -> str:
        return f"HVector({[str(e) for e in self.entries]})"


def _arr(a) -> np.ndarray:
    return a.to_array() if isinstance(a, BitMatrix) else np.asarray(a)


def h_sum(a) -> int:
    return int(_arr(a).astype(np.int64).sum())


def h_prod(a) -> float:
    s = _arr(a).astype(np.int64).sum(axis=0)
    if np.any(s == 0):
        raise ValueError("h_prod undefined for a zero column")
    return float(np.log(s).sum())


def _gl_variants(a: BitMatrix):
    try:
        ai = inverse(a)
    except Exception as exc:
        raise type(exc)(f"heuristic needs an invertible matrix: {exc}") from None
    return a, transpose(a), ai, transpose(ai)


def H_sum_gl(a: BitMatrix) -> float:
    n = a.rows
    ai = _gl_variants(a)[2]
    return (h_sum(a) + h_sum(ai)) / (2 * n) - 1


def H_prod_gl(a: BitMatrix) -> float:
    n = a.rows
    return sum(h_prod(v) for v in _gl_variants(a)) / (4 * n)


def h_vector_gl(a: BitMatrix, order: str = "asc") -> HVector:
    vals = []
    for v in _gl_variants(a):
        vals.extend(int(s) - 1 for s in v.to_array().sum(axis=0))
    return HVector(vals, 1, order)


def _check_sp(a: BitMatrix) -> None:
    if a.rows != a.cols or a.rows % 2 or not is_symplectic(a):
        raise NotSymplectic("heuristic needs a symplectic matrix")


def h_vector_sp(a: BitMatrix, order: str = "asc", check: bool = True) -> HVector:
    """Column sums of R2 + R1/n for A and Aᵀ, minus one; stored scaled by n."""
    if check:
        _check_sp(a)
    n = a.rows // 2
    rm = rank_mask(a)
    scaled = n * rm.r2.astype(np.int64) + rm.r1.astype(np.int64)
    vals = list(scaled.sum(axis=0) - n) + list(scaled.sum(axis=1) - n)
    return HVector(vals, n, order)


def H_sum_sp(a: BitMatrix, check: bool = True) -> float:
    if check:
        _check_sp(a)
    n = a.rows // 2
    r12 = rank_mask(a).r12
    return (h_sum(r12) + h_sum(r12.T)) / (2 * n) - 1


def H_prod_sp(a: BitMatrix, check: bool = True) -> float:
    if check:
        _check_sp(a)
    n = a.rows // 2
    r12 = rank_mask(a).r12
    return (h_prod(r12) + h_prod(r12.T)) / (2 * n)


def scalar(kind: str, name: str):
    """Look up a scalar heuristic by kind ('gl'/'sp') and name ('hsum'/'hprod')."""
    table = {("gl", "hsum"): H_sum_gl, ("gl", "hprod"): H_prod_gl,
             ("sp", "hsum"): H_sum_sp, ("sp", "hprod"): H_prod_sp}
    try:
        return table[(kind, name)]
    except KeyError:
        raise ValueError(f"no scalar heuristic {name!r} for {kind!r}") from None


__all__ = ["HVector", "h_sum", "h_prod", "H_sum_gl", "H_prod_gl", "h_vector_gl",
           "h_vector_sp", "H_sum_sp", "H_prod_sp", "scalar"]
