"""Subcube embeddings y ↦ x(y), x(y)_i = y_{h(i)} ⊕ a_i, and spanned cubes.

Buckets are 0-indexed: ``h[i] ∈ range(k)``. ``h`` need not be onto; an
empty bucket just makes the corresponding y-coordinate irrelevant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from .bits import PointLike, as_point, cube_indices, to_bitstring
from .poly import MultilinearPoly
from .seeds import SeedLike, as_rng


class SubcubeEmbedding:
    __slots__ = ("n", "k", "a", "h")

    def __init__(self, n: int, k: int, a: PointLike, h: Sequence[int]):
        n, k = int(n), int(k)
        if not 1 <= k:
            raise ValueError("k must be >= 1")
        a = as_point(a, n)
        h = np.asarray(h, dtype=np.int64)
        if h.shape != (n,):
            raise ValueError(f"bucket map must have length {n}")
        if n and (h.min() < 0 or h.max() >= k):
            raise ValueError(f"bucket map values must lie in range({k})")
        a.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "h", h)

    def __setattr__(self, name, value):
        raise AttributeError("SubcubeEmbedding is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, SubcubeEmbedding)
            and (self.n, self.k) == (other.n, other.k)
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.h, other.h)
        )

    def __hash__(self):
        return hash((self.n, self.k, self.a.tobytes(), self.h.tobytes()))

    def __repr__(self):
        return f"SubcubeEmbedding(n={self.n}, k={self.k}, a={to_bitstring(self.a)!r}, h={self.h.tolist()})"

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "a": to_bitstring(self.a), "h": self.h.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "SubcubeEmbedding":
        return cls(obj["n"], obj["k"], obj["a"], obj["h"])


def embed(emb: SubcubeEmbedding, y: PointLike) -> np.ndarray:
    y = as_point(y, emb.k)
    return emb.a ^ y[emb.h]


def embed_many(emb: SubcubeEmbedding, Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.uint8)
    if Y.ndim != 2 or Y.shape[1] != emb.k:
        raise ValueError(f"expected (N, {emb.k}) points")
    return emb.a[None, :] ^ Y[:, emb.h]


def cube_points(emb: SubcubeEmbedding) -> np.ndarray:
    """All ``2^k`` images, row ``y`` holding ``embed(emb, y)`` with y indexed by ``Σ y_j 2^j``."""
    return embed_many(emb, cube_indices(emb.k))


def random_embedding(n: int, k: int, seed: SeedLike) -> SubcubeEmbedding:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = as_rng(seed)
    a = rng.integers(0, 2, size=n, dtype=np.uint8)
    h = rng.integers(0, k, size=n)
    return SubcubeEmbedding(n, k, a, h)


def random_embeddings_many(n: int, k: int, count: int, rng: np.random.Generator):
    """``count`` independent embeddings as stacked ``(a, h)`` arrays."""
    a = rng.integers(0, 2, size=(count, n), dtype=np.uint8)
    h = rng.integers(0, k, size=(count, n))
    return a, h


@dataclass(frozen=True, eq=False)
class SpannedSubcube:
    base: SubcubeEmbedding
    w: np.ndarray
    sigma: tuple

    @property
    def k(self) -> int:
        return self.base.k // 2


def _check_sigma(sigma, k2: int) -> tuple:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(k2)):
        raise ValueError(f"sigma must be a permutation of range({k2})")
    return sigma


def span_with(emb: SubcubeEmbedding, b: PointLike, sigma: Sequence[int]) -> SpannedSubcube:
    """The 2k-cube through ``emb``'s k-cube and the point ``b``.

    With ``v = a ⊕ b``, coordinate i goes to bucket ``σ(h(i))`` when
    ``v_i = 0`` and to ``σ(h(i)+k)`` otherwise; ``w`` is 1 exactly on
    ``σ(k..2k−1)``, so ``embed(w) = b`` and ``|w| = k``.
    """
    b = as_point(b, emb.n)
    k = emb.k
    sig = np.asarray(_check_sigma(sigma, 2 * k), dtype=np.int64)
    v = emb.a ^ b
    h2 = sig[emb.h + k * v.astype(np.int64)]
    w = np.zeros(2 * k, dtype=np.uint8)
    w[sig[k:]] = 1
    w.setflags(write=False)
    return SpannedSubcube(SubcubeEmbedding(emb.n, 2 * k, emb.a, h2), w, tuple(sig.tolist()))


def pair_map(sigma: Sequence[int]) -> np.ndarray:
    """``z``-index → ``y``-index under the identification z_{σ(j)} = z_{σ(j+k)} = y_j."""
    sig = _check_sigma(sigma, len(sigma))
    if len(sig) % 2:
        raise ValueError("sigma must permute an even number of variables")
    k = len(sig) // 2
    inv = np.empty(2 * k, dtype=np.int64)
    for j in range(k):
        inv[sig[j]] = j
        inv[sig[j + k]] = j
    return inv


def lift_pair(y: PointLike, sigma: Sequence[int]) -> np.ndarray:
    inv = pair_map(sigma)
    y = as_point(y, len(inv) // 2)
    return y[inv]


def restrict_pair(R: MultilinearPoly, sigma: Sequence[int]) -> MultilinearPoly:
    if len(sigma) != R.n or R.n % 2:
        raise ValueError("restrict_pair needs a polynomial in 2k variables and a permutation of the same size")
    inv = pair_map(sigma)
    G = R.group
    out: Dict[tuple, Any] = {}
    for mon, c in R.coeffs.items():
        m = tuple(sorted({int(inv[i]) for i in mon}))
        out[m] = G.add(out.get(m, G.zero), c)
    return MultilinearPoly(G, R.n // 2, R.d, out)
