"""Local list correction for degree-1 polynomials.

Advice harvesting: list-decode f on ``ell`` random k-cubes and keep every
close codeword restriction Q, tagged with its cube C; one permutation σ of
[2k] is drawn after the loop. The approximator ψ_{C,σ,Q} answers at b by
spanning the 2k-cube through C and b, list-decoding f there, and returning
R(w) for the first candidate R whose paired restriction equals Q.

Each ψ is then used as an oracle by the unique corrector, which gives one
point corrector per piece of advice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .bits import PointLike, as_point
from .correct import CorrectorParams, unique_correct, unique_correct_budget
from .cube import SubcubeEmbedding, cube_points, random_embedding, restrict_pair, span_with
from .decode import as_fraction, list_decode
from .groups import GroupValue
from .oracle import QueryOracle
from .poly import MultilinearPoly, Table, evaluate_many
from .seeds import SeedLike, as_rng, child_seed, substream


def decode_radius(eps) -> Fraction:
    return Fraction(1, 2) - as_fraction(eps) / 2


def default_ell(expected_list_size: int) -> int:
    return math.ceil(math.log2(max(1, expected_list_size))) + 1


@dataclass(frozen=True, eq=False)
class ApproxOracle:
    C: SubcubeEmbedding
    sigma: Tuple[int, ...]
    Q: MultilinearPoly
    eps: float

    def __post_init__(self):
        if self.C.k % 2:
            raise ValueError("advice cubes must have even dimension")
        if sorted(self.sigma) != list(range(2 * self.C.k)):
            raise ValueError("sigma must be a permutation of range(2k)")
        if self.Q.n != self.C.k or self.Q.degree > 1:
            raise ValueError("advice must be a degree-<=1 polynomial on the cube's variables")
        object.__setattr__(self, "sigma", tuple(int(s) for s in self.sigma))

    def to_json(self) -> dict:
        return {"C": self.C.to_json(), "sigma": list(self.sigma), "Q": self.Q.to_json(), "eps": self.eps}


def build_approx_oracles(
    f: QueryOracle, eps, k: int, ell: int, seed: SeedLike = None, strategy: str = "auto"
) -> List[ApproxOracle]:
    if k % 2 or k < 2:
        raise ValueError("k must be even and >= 2")
    if k > f.n:
        raise ValueError("k must not exceed n")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if not 0 < as_fraction(eps) <= 1:
        raise ValueError("eps must lie in (0, 1]")
    rng = as_rng(seed)
    r = decode_radius(eps)
    found = []
    for _ in range(ell):
        C = random_embedding(f.n, k, rng)
        table = Table(f.group, k, f.query_many(cube_points(C)))
        for Q in list_decode(table, 1, r, strategy=strategy):
            found.append((C, Q))
    sigma = tuple(rng.permutation(2 * k).tolist())
    return [ApproxOracle(C, sigma, Q.with_degree(1), float(eps)) for C, Q in found]


def _psi_candidates(C: SubcubeEmbedding, sigma, f: QueryOracle, b: np.ndarray, eps, strategy: str):
    """Spanned cube through C and b, plus the list decoded on it (2^{2k} queries)."""
    span = span_with(C, b, sigma)
    table = Table(f.group, 2 * C.k, f.query_many(cube_points(span.base)))
    return span, list_decode(table, 1, decode_radius(eps), strategy=strategy)


def _select(span, cands, sigma, Q: MultilinearPoly, group):
    w = span.w[None, :]
    for R in cands:
        if restrict_pair(R, sigma) == Q:
            return evaluate_many(R, w)[0]
    return group.zero


def psi_eval(oracle: ApproxOracle, f: QueryOracle, b: PointLike, strategy: str = "auto") -> GroupValue:
    b = as_point(b, f.n)
    span, cands = _psi_candidates(oracle.C, oracle.sigma, f, b, oracle.eps, strategy)
    return GroupValue(f.group, _select(span, cands, oracle.sigma, oracle.Q, f.group))


def psi_eval_shared(oracles: Sequence[ApproxOracle], f: QueryOracle, b: PointLike, strategy: str = "auto") -> list:
    """ψ for several oracles built on the same cube and σ, from one spanned cube.

    Answers equal separate ``psi_eval`` calls; only 2^{2k} queries are made.
    """
    if not oracles:
        return []
    C, sigma = oracles[0].C, oracles[0].sigma
    if any(o.C != C or o.sigma != sigma for o in oracles):
        raise ValueError("oracles must share their cube and sigma")
    b = as_point(b, f.n)
    span, cands = _psi_candidates(C, sigma, f, b, oracles[0].eps, strategy)
    return [_select(span, cands, sigma, o.Q, f.group) for o in oracles]


class PsiOracle(QueryOracle):
    """ψ as a query oracle; its own counter counts ψ evaluations."""

    def __init__(self, approx: ApproxOracle, f: QueryOracle, strategy: str = "auto"):
        super().__init__(f.group, f.n, f.truth)
        self.approx, self.f, self.strategy = approx, f, strategy

    def _answer(self, X):
        out = self.group.zeros(X.shape[0])
        for i, x in enumerate(X):
            span, cands = _psi_candidates(self.approx.C, self.approx.sigma, self.f, x, self.approx.eps, self.strategy)
            out[i] = _select(span, cands, self.approx.sigma, self.approx.Q, self.group)
        return out


# ψ is treated as a 1/100-erroneous oracle
LIST_CORRECTOR_DEFAULTS = CorrectorParams(delta=0.01)


@dataclass(frozen=True)
class ListParams:
    k: int = 8
    ell: int = 3
    seed: int = 0
    corrector: CorrectorParams = field(default_factory=lambda: LIST_CORRECTOR_DEFAULTS)
    strategy: str = "auto"


class ListCorrector:
    """A randomized point corrector: the unique pipeline run against one ψ."""

    def __init__(self, approx: ApproxOracle, f: QueryOracle, params: CorrectorParams, strategy: str = "auto"):
        self.approx = approx
        self.f = f
        self.params = params
        self.psi = PsiOracle(approx, f, strategy)
        self._calls = 0

    @property
    def budget(self) -> int:
        """Queries to f per evaluation: 2^{2k} per ψ call times the unique budget."""
        return (1 << (2 * self.approx.C.k)) * unique_correct_budget(self.f.n, self.params)

    def __call__(self, x: PointLike, seed: SeedLike = None) -> GroupValue:
        if seed is None:
            seed = substream(self.params.seed, "call", self._calls)
            self._calls += 1
        return unique_correct(self.psi, x, self.params, seed)


def local_list_correct(f: QueryOracle, eps, params: ListParams = ListParams()) -> List[ListCorrector]:
    oracles = build_approx_oracles(f, eps, params.k, params.ell, substream(params.seed, "advice"), params.strategy)
    out = []
    for i, o in enumerate(oracles):
        cp = CorrectorParams(**{**params.corrector.to_json(), "seed": child_seed(substream(params.seed, "corrector", i))})
        out.append(ListCorrector(o, f, cp, params.strategy))
    return out
