"""Unique local correction in three stages.

1. ``correct_small_error``: evaluate a random correction gadget
   (q = 2⌈log₂ n⌉ + 3 queries) and take the plurality over ``reps`` runs.
2. ``base_reduce`` / ``reduced_oracle``: three error-reduction gadgets per
   point, plurality vote; stacking t levels turns error γ into roughly
   γ^{1.1^t} at a cost of K^t queries.
3. ``subcube_reduce``: restrict to a random k-dimensional subcube through the
   point, unique-decode the 2^k-entry table and read off its value at 0^k.

``unique_correct`` composes them: stage 3 wraps f as an oracle with fixed
randomness, stage 2 wraps that, and stage 1 runs on top.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .bits import PointLike, as_point, as_points, cube_indices
from .decode import plurality_rows, unique_decode_many
from .gadget import gadget_q, gadget_queries, reduction_k, reduction_terms
from .groups import GroupValue
from .oracle import QueryOracle
from .seeds import SeedLike, as_rng, child_seed, substream

DEFAULT_RHO = 0.1
DEFAULT_K_SUBCUBE = 6
CHUNK_BITS = 1 << 23


def _seed_int(seed: SeedLike) -> int:
    if isinstance(seed, np.random.Generator):
        return child_seed(seed)
    if seed is None:
        return child_seed(np.random.default_rng())
    return int(seed)


@dataclass(frozen=True)
class CorrectorParams:
    d: int = 1
    delta: float = 0.15
    eta: float = 1e-3
    reps: int = 5
    k_subcube: int = DEFAULT_K_SUBCUBE
    t_levels: int = 0
    rho: float = DEFAULT_RHO
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not 0 <= self.delta < 2.0 ** -(self.d + 1):
            raise ValueError(f"delta must lie in [0, 2^-{self.d + 1})")
        if self.reps < 1 or self.reps % 2 == 0:
            raise ValueError("reps must be a positive odd integer")
        if self.k_subcube < 2 * self.d + 2:
            raise ValueError(f"k_subcube must be >= {2 * self.d + 2}")
        if self.t_levels < 0:
            raise ValueError("t_levels must be >= 0")

    def to_json(self) -> dict:
        return asdict(self)


def levels_for(delta: float, eta: float) -> int:
    """Levels T with δ^{1.1^T} ≤ η, i.e. T = ⌈log_{1.1}(log(1/η) / log(1/δ))⌉."""
    if not (0 < delta < 1 and 0 < eta < 1):
        raise ValueError("delta and eta must lie in (0, 1)")
    return max(0, math.ceil(math.log(math.log(1 / eta) / math.log(1 / delta)) / math.log(1.1)))


def reduction_cost(d: int, rho: float = DEFAULT_RHO) -> int:
    """K: queries made by one base reduction (three gadgets)."""
    k = reduction_k(d, rho)
    return 3 * len(reduction_terms(d, k)[1])


def unique_correct_budget(n: int, params: CorrectorParams) -> int:
    return gadget_q(n) * params.reps * reduction_cost(params.d, params.rho) ** params.t_levels * (1 << params.k_subcube)


# -- stage 1 ------------------------------------------------------------------

def _small_error(f: QueryOracle, a: np.ndarray, reps: int, rng: np.random.Generator):
    samples = [gadget_queries(f.n, a, rng) for _ in range(reps)]
    q = samples[0].q
    vals = f.query_many(np.concatenate([s.queries for s in samples])).reshape(reps, q)
    sums = f.group.lincomb_v(samples[0].coeffs, vals)
    return plurality_rows(f.group, sums[None, :])[0]


def correct_small_error(f: QueryOracle, a: PointLike, reps: int = 5, seed: SeedLike = None) -> GroupValue:
    a = as_point(a, f.n)
    return GroupValue(f.group, _small_error(f, a, reps, as_rng(seed)))


# -- stage 2 ------------------------------------------------------------------

def _chunk(n_points: int, per_point: int, n: int) -> int:
    return max(1, CHUNK_BITS // max(1, per_point * n))


def _gadget_values(g: QueryOracle, pts: np.ndarray, alphas) -> np.ndarray:
    """``pts`` is ``(N, q, n)``; returns ``Σ_b α_b g(pts[:, b])`` per row."""
    N, q, n = pts.shape
    vals = g.query_many(pts.reshape(N * q, n)).reshape(N, q)
    return g.group.lincomb_v(alphas, vals)


def base_reduce_many(g: QueryOracle, A: np.ndarray, d: int, rng: np.random.Generator, rho: float = DEFAULT_RHO) -> np.ndarray:
    """Base reduction at every row of ``A``, each with fresh gadgets."""
    A = as_points(A, g.n)
    k = reduction_k(d, rho)
    _, terms = reduction_terms(d, k)
    B = np.asarray([b for b, _ in terms], dtype=np.uint8)
    alphas = [al for _, al in terms]
    N = A.shape[0]
    out = []
    step = _chunk(N, len(terms), g.n)
    for s in range(0, N, step):
        As = A[s : s + step]
        reps = []
        for _ in range(3):
            h = rng.integers(0, k, size=As.shape)
            pts = As[:, None, :] ^ B[:, h].transpose(1, 0, 2)
            reps.append(_gadget_values(g, pts, alphas))
        out.append(plurality_rows(g.group, np.stack(reps, axis=1)))
    return np.concatenate(out) if out else g.group.zeros(0)


def base_reduce(g: QueryOracle, a: PointLike, d: int, seed: SeedLike = None, rho: float = DEFAULT_RHO) -> GroupValue:
    a = as_point(a, g.n)
    return GroupValue(g.group, base_reduce_many(g, a[None, :], d, as_rng(seed), rho)[0])


class ReducedOracle(QueryOracle):
    """One level of base reduction with its three bucket maps fixed up front,
    so answers are a deterministic function of the point."""

    def __init__(self, inner: QueryOracle, d: int, rng: np.random.Generator, rho: float = DEFAULT_RHO):
        super().__init__(inner.group, inner.n, inner.truth)
        self.inner = inner
        k = reduction_k(d, rho)
        _, terms = reduction_terms(d, k)
        B = np.asarray([b for b, _ in terms], dtype=np.uint8)
        self.alphas = [al for _, al in terms]
        self.shifts = [B[:, rng.integers(0, k, size=inner.n)] for _ in range(3)]  # each (q, n)
        self.K = 3 * len(terms)

    def query_many(self, X) -> np.ndarray:
        # charge only the inner oracle; this level is a derived view
        X = as_points(X, self.n)
        return self._answer(X)

    def _answer(self, X):
        out = []
        step = _chunk(X.shape[0], len(self.alphas), self.n)
        for s in range(0, X.shape[0], step):
            Xs = X[s : s + step]
            reps = [_gadget_values(self.inner, Xs[:, None, :] ^ S[None, :, :], self.alphas) for S in self.shifts]
            out.append(plurality_rows(self.group, np.stack(reps, axis=1)))
        return np.concatenate(out) if out else self.group.zeros(0)

    @property
    def count(self) -> int:
        return self.inner.count


def reduced_oracle(f: QueryOracle, d: int, t_levels: int, seed: SeedLike = None, rho: float = DEFAULT_RHO) -> QueryOracle:
    if t_levels < 0:
        raise ValueError("t_levels must be >= 0")
    base = _seed_int(seed)
    g = f
    for t in range(1, t_levels + 1):
        g = ReducedOracle(g, d, substream(base, "level", t), rho)
    return g


# -- stage 3 ------------------------------------------------------------------

def _subcube_values(f: QueryOracle, A: np.ndarray, H: np.ndarray, k: int, d: int) -> np.ndarray:
    """Decoded value at 0^k of the cube C_{a,h} for each row pair of ``A``, ``H``."""
    Y = cube_indices(k)
    N = A.shape[0]
    out = []
    step = _chunk(N, 1 << k, f.n)
    zero = f.group.zeros(())
    for s in range(0, N, step):
        As, Hs = A[s : s + step], H[s : s + step]
        pts = As[:, None, :] ^ Y[:, Hs].transpose(1, 0, 2)
        vals = f.query_many(pts.reshape(-1, f.n)).reshape(As.shape[0], 1 << k)
        coeffs, ok = unique_decode_many(f.group, vals, k, d)
        out.append(np.where(ok, coeffs[()], zero))
    return np.concatenate(out) if out else f.group.zeros(0)


def subcube_reduce_many(f: QueryOracle, A: np.ndarray, k: int, d: int, rng: np.random.Generator) -> np.ndarray:
    A = as_points(A, f.n)
    H = rng.integers(0, k, size=A.shape)
    return _subcube_values(f, A, H, k, d)


def subcube_reduce(f: QueryOracle, a: PointLike, k: int, d: int, seed: SeedLike = None) -> GroupValue:
    a = as_point(a, f.n)
    return GroupValue(f.group, subcube_reduce_many(f, a[None, :], k, d, as_rng(seed))[0])


class SubcubeReducedOracle(QueryOracle):
    """Stage 3 as an oracle: one bucket map h, drawn at construction."""

    def __init__(self, f: QueryOracle, k: int, d: int, seed: SeedLike = None):
        super().__init__(f.group, f.n, f.truth)
        self.inner, self.k, self.d = f, k, d
        self.h = as_rng(seed).integers(0, k, size=f.n)

    def query_many(self, X) -> np.ndarray:
        X = as_points(X, self.n)
        return self._answer(X)

    def _answer(self, X):
        return _subcube_values(self.inner, X, np.broadcast_to(self.h, X.shape), self.k, self.d)

    @property
    def count(self) -> int:
        return self.inner.count


def corrector_oracle(f: QueryOracle, params: CorrectorParams) -> QueryOracle:
    """Stages 3 and 2 stacked on ``f``; stage 1 runs against the result."""
    g = SubcubeReducedOracle(f, params.k_subcube, params.d, substream(params.seed, "subcube"))
    return reduced_oracle(g, params.d, params.t_levels, substream(params.seed, "levels"), params.rho)


def unique_correct(f: QueryOracle, a: PointLike, params: CorrectorParams, seed: SeedLike = None) -> GroupValue:
    """Corrected value at ``a``. ``seed`` drives stage 1 only (defaults to a
    substream of ``params.seed``); stages 2 and 3 always follow ``params.seed``."""
    g = corrector_oracle(f, params)
    rng = substream(params.seed, "small-error") if seed is None else as_rng(seed)
    return correct_small_error(g, a, params.reps, rng)
