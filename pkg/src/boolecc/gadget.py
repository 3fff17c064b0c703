"""Correction gadgets for degree-1 polynomials and error-reduction gadgets.

The balanced matrix ``A_k`` has rows indexed by i = 1..2^k−1. Row i starts
from the 2k-bit word ``bin(i) bin(i−1)`` (most significant bit first),
complements every column except column k and drops column 2k. With

    c_j = −2^{k−j−1}  (j < k),   c_k = 1,   c_j = 2^{2k−j−1}  (j > k)

each row satisfies ``row · c = 1`` and ``Σ c = 1``. Picking a random row per
coordinate therefore yields 2k−1 points whose c-weighted sum is 1ⁿ in every
coordinate, so ``Σ c_j P(y_j) = P(1ⁿ)`` for degree-1 P; XOR-shifting by
``1ⁿ ⊕ target`` moves the identity to any target.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .bits import PointLike, as_point
from .poly import ball_interpolation_coeffs
from .seeds import SeedLike, as_rng


def _matrix_rows(k: int, idx: np.ndarray) -> np.ndarray:
    """Rows ``idx`` (values in 1..2^k−1) of ``A_k`` as a uint8 matrix."""
    idx = np.asarray(idx, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1)
    hi = (idx[..., None] >> shifts) & 1
    lo = ((idx[..., None] - 1) >> shifts) & 1
    M = np.concatenate([hi, lo], axis=-1)[..., : 2 * k - 1].astype(np.uint8)
    flip = np.ones(2 * k - 1, dtype=np.uint8)
    flip[k - 1] = 0
    return M ^ flip


def balanced_coeffs(k: int) -> List[int]:
    return [-(2 ** (k - j - 1)) for j in range(1, k)] + [1] + [2 ** (2 * k - j - 1) for j in range(k + 1, 2 * k)]


@dataclass(frozen=True, eq=False)
class BalancedMatrix:
    k: int
    rows: np.ndarray
    c: Tuple[int, ...]

    def check(self) -> List[str]:
        """Names of violated invariants; empty when all hold."""
        k, A, c = self.k, self.rows, self.c
        bad = []
        if A.shape != ((1 << k) - 1, 2 * k - 1) or len(c) != 2 * k - 1:
            return ["shape"]
        prod = A.astype(object) @ np.asarray(c, dtype=object)
        if not all(v == 1 for v in prod):
            bad.append("A·c = 1")
        if sum(c) != 1:
            bad.append("sum(c) = 1")
        if int(A.all(axis=1).sum()) != 1:
            bad.append("one all-ones row")
        w = A.sum(axis=0)
        lo, hi = 2 ** (k - 1) - 1, 2 ** (k - 1) + 1
        if w.min() < lo or w.max() > hi:
            bad.append("column weights")
        return bad

    def to_json(self) -> dict:
        return {"k": self.k, "rows": self.rows.tolist(), "c": list(self.c)}


def build_balanced_matrix(k: int) -> BalancedMatrix:
    if k < 2:
        raise ValueError("k must be >= 2")
    rows = _matrix_rows(k, np.arange(1, 1 << k))
    return BalancedMatrix(k, rows, tuple(balanced_coeffs(k)))


def gadget_k(n: int) -> int:
    """k = ⌈log₂ n⌉ + 2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n - 1).bit_length() + 2


def gadget_q(n: int) -> int:
    return 2 * gadget_k(n) - 1


@dataclass(frozen=True, eq=False)
class GadgetSample:
    q: int
    coeffs: Tuple[int, ...]
    queries: np.ndarray  # (q, n)
    target: np.ndarray

    def check(self) -> bool:
        # int64 is exact while q·max|c| stays below 2^62; fall back to Python ints
        big = len(self.coeffs) * max(abs(c) for c in self.coeffs) >= 1 << 62
        dtype = object if big else np.int64
        lhs = np.asarray(self.coeffs, dtype=dtype) @ self.queries.astype(dtype)
        return sum(self.coeffs) == 1 and all(int(v) == int(t) for v, t in zip(lhs, self.target))


def gadget_queries(n: int, target: PointLike, seed: SeedLike) -> GadgetSample:
    rng = as_rng(seed)
    t = as_point(target, n)
    k = gadget_k(n)
    rows = _matrix_rows(k, rng.integers(1, 1 << k, size=n))  # (n, q)
    queries = (rows ^ (1 ^ t)[:, None]).T.copy()
    return GadgetSample(2 * k - 1, tuple(balanced_coeffs(k)), queries, t)


def reduction_k(d: int, rho) -> int:
    """k = 2⌈2d/ρ⌉, computed exactly."""
    r = Fraction(rho).limit_denominator(10**9) if isinstance(rho, float) else Fraction(rho)
    if not 0 < r <= 1:
        raise ValueError("rho must lie in (0, 1]")
    if d < 1:
        raise ValueError("d must be >= 1")
    return 2 * math.ceil(Fraction(2 * d) / r)


@dataclass(frozen=True, eq=False)
class ReductionGadget:
    d: int
    rho: float
    k: int
    center: Tuple[int, ...]
    terms: Tuple[Tuple[Tuple[int, ...], int], ...]
    h: np.ndarray

    @property
    def q(self) -> int:
        return len(self.terms)

    @property
    def points(self) -> np.ndarray:
        """Ball points as a ``(q, k)`` matrix."""
        return np.asarray([b for b, _ in self.terms], dtype=np.uint8)

    @property
    def alphas(self) -> List[int]:
        return [a for _, a in self.terms]


def default_center(k: int) -> Tuple[int, ...]:
    return tuple([1] * (k // 2) + [0] * (k - k // 2))


def reduction_terms(d: int, k: int, center=None):
    center = default_center(k) if center is None else tuple(int(v) for v in center)
    return center, tuple(ball_interpolation_coeffs(k, d, center))


def reduction_gadget(
    d: int, rho, n: int, target: PointLike, seed: SeedLike, k: Optional[int] = None, center=None
) -> Tuple[ReductionGadget, np.ndarray]:
    """Gadget plus its query points ``target ⊕ b_h`` (one row per ball term).

    ``k`` and ``center`` override the defaults; they exist for tests.
    """
    if k is None:
        k = reduction_k(d, rho)
    elif not 0 < rho <= 1 or d < 1:
        raise ValueError("need 0 < rho <= 1 and d >= 1")
    t = as_point(target, n)
    rng = as_rng(seed)
    h = rng.integers(0, k, size=n)
    center, terms = reduction_terms(d, k, center)
    g = ReductionGadget(d, rho, k, center, terms, h)
    return g, t[None, :] ^ g.points[:, h]
