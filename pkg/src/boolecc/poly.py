"""Multilinear polynomials over {0,1}^n with coefficients in an Abelian group.

Monomials are sorted index tuples (``()`` is the constant term), which keeps
sparse degree-1 polynomials cheap at n = 10^5. Full tables over {0,1}^n are
indexed by ``Σ_i x_i 2^i`` and produced/consumed by subset-sum transforms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .bits import PointLike, as_point, as_points
from .groups import Group, GroupMismatchError, GroupValue, group_from_json
from .seeds import SeedLike, as_rng

Monomial = Tuple[int, ...]

TABLE_BUDGET = 20


class DegreeExceededError(ValueError):
    def __init__(self, d_max: int, monomial: Monomial):
        super().__init__(f"coefficient of degree {len(monomial)} > {d_max} at {monomial}")
        self.d_max = d_max
        self.monomial = monomial


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    group: Group
    n: int
    d: int
    coeffs: Mapping[Monomial, Any] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Monomial, Any] = {}
        zero = self.group.zero
        for mon, c in self.coeffs.items():
            if len(mon) > 1:
                mon = tuple(sorted(int(i) for i in mon))
                if len(set(mon)) != len(mon):
                    raise ValueError(f"repeated variable in monomial {mon}")
            elif mon:
                mon = (int(mon[0]),)
            else:
                mon = ()
            if mon and (mon[0] < 0 or mon[-1] >= self.n):
                raise ValueError(f"monomial {mon} out of range for n={self.n}")
            if len(mon) > self.d:
                raise DegreeExceededError(self.d, mon)
            c = self.group.coerce(c)
            if c != zero:
                clean[mon] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls, group: Group, n: int, d: int) -> "MultilinearPoly":
        return cls(group, n, d, {})

    def __eq__(self, other):
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return (self.group, self.n, self.d, self.coeffs) == (other.group, other.n, other.d, other.coeffs)

    def __hash__(self):
        return hash((self.group, self.n, self.d, frozenset(self.coeffs.items())))

    def __repr__(self):
        terms = " + ".join(
            f"{self.group.serialize(c)}" + "".join(f"*x{i}" for i in mon) for mon, c in sorted(self.coeffs.items())
        )
        return f"MultilinearPoly(n={self.n}, d={self.d}, {terms or '0'})"

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.coeffs), default=0)

    def coefficient(self, mon: Iterable[int]) -> Any:
        return self.coeffs.get(tuple(sorted(mon)), self.group.zero)

    def sort_key(self):
        return tuple(sorted((m, self.group.sort_key(c)) for m, c in self.coeffs.items()))

    def with_degree(self, d: int) -> "MultilinearPoly":
        return MultilinearPoly(self.group, self.n, d, self.coeffs)

    @cached_property
    def _linear(self):
        idx = [m[0] for m in self.coeffs if len(m) == 1]
        idx.sort()
        return np.asarray(idx, dtype=np.int64), [self.coeffs[(i,)] for i in idx]

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return neg(self)

    # -- JSON ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "terms": [{"vars": list(m), "coeff": self.group.to_json(c)} for m, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, obj: dict, group: Group) -> "MultilinearPoly":
        n, d = int(obj["n"]), int(obj["d"])
        coeffs: Dict[Monomial, Any] = {}
        for t in obj.get("terms", []):
            mon = tuple(sorted(int(i) for i in t["vars"]))
            if mon in coeffs:
                raise ValueError(f"duplicate monomial {mon}")
            coeffs[mon] = group.from_json(t["coeff"])
        return cls(group, n, d, coeffs)


def _check_same(P: MultilinearPoly, Q: MultilinearPoly) -> None:
    if P.group != Q.group:
        raise GroupMismatchError(f"{P.group} vs {Q.group}")
    if P.n != Q.n:
        raise ValueError(f"dimension mismatch {P.n} vs {Q.n}")


def add(P: MultilinearPoly, Q: MultilinearPoly) -> MultilinearPoly:
    _check_same(P, Q)
    G = P.group
    out = dict(P.coeffs)
    for m, c in Q.coeffs.items():
        out[m] = G.add(out.get(m, G.zero), c)
    return MultilinearPoly(G, P.n, max(P.d, Q.d), out)


def neg(P: MultilinearPoly) -> MultilinearPoly:
    return MultilinearPoly(P.group, P.n, P.d, {m: P.group.neg(c) for m, c in P.coeffs.items()})


def sub(P: MultilinearPoly, Q: MultilinearPoly) -> MultilinearPoly:
    return add(P, neg(Q))


def scale(n: int, P: MultilinearPoly) -> MultilinearPoly:
    return MultilinearPoly(P.group, P.n, P.d, {m: P.group.mul(n, c) for m, c in P.coeffs.items()})


# -- evaluation ---------------------------------------------------------

def evaluate(P: MultilinearPoly, x: PointLike) -> GroupValue:
    x = as_point(x, P.n)
    return GroupValue(P.group, evaluate_many(P, x[None, :])[0])


def evaluate_many(P: MultilinearPoly, X: np.ndarray) -> np.ndarray:
    """Payload array of ``P`` at each row of the ``(N, n)`` bit matrix ``X``."""
    X = as_points(X, P.n)
    G = P.group
    N = X.shape[0]
    idx, lin = P._linear
    acc = G.lin_bits(X[:, idx], lin) if len(idx) else G.zeros(N)
    const = P.coeffs.get(())
    if const is not None:
        acc = G.add_v(acc, G.mask_v(np.ones(N, dtype=bool), const))
    for mon, c in P.coeffs.items():
        if len(mon) >= 2:
            active = X[:, list(mon)].all(axis=1)
            acc = G.add_v(acc, G.mask_v(active, c))
    return acc


# -- tables -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Table:
    """Values of a function {0,1}^n → G, index ``Σ x_i 2^i``."""

    group: Group
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (1 << self.n,):
            raise ValueError(f"table over n={self.n} needs {1 << self.n} entries, got {self.values.shape}")

    def __eq__(self, other):
        return (
            isinstance(other, Table)
            and self.group == other.group
            and self.n == other.n
            and bool(self.group.eq_v(self.values, other.values).all())
        )

    def __getitem__(self, x):
        return self.values[x]

    def to_json(self) -> dict:
        return {"group": self.group.spec_json(), "n": self.n, "values": [self.group.to_json(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> "Table":
        G = group_from_json(obj["group"])
        return cls(G, int(obj["n"]), G.asarray(G.from_json(v) for v in obj["values"]))


def _zeta(group: Group, values: np.ndarray, n: int, inverse: bool) -> np.ndarray:
    """Subset-sum (or Möbius) transform along the last axis of length 2^n."""
    lead = values.shape[:-1]
    T = values.copy()
    for i in range(n):
        V = T.reshape(lead + (-1, 2, 1 << i))
        lo, hi = V[..., 0, :], V[..., 1, :]
        V[..., 1, :] = group.sub_v(hi, lo) if inverse else group.add_v(hi, lo)
        T = V.reshape(lead + (-1,))
    return T


def tabulate(P: MultilinearPoly, budget: int = TABLE_BUDGET) -> Table:
    if P.n > budget:
        raise ValueError(f"n={P.n} exceeds the tabulation budget {budget}")
    G = P.group
    C = G.zeros(1 << P.n)
    for mon, c in P.coeffs.items():
        C[sum(1 << i for i in mon)] = c
    return Table(G, P.n, _zeta(G, C, P.n, inverse=False))


def interpolate(table: Table, d_max: Optional[int] = None) -> MultilinearPoly:
    """Unique multilinear polynomial through ``table``, via signed subset sums."""
    G, n = table.group, table.n
    C = _zeta(G, table.values, n, inverse=True)
    nz = np.flatnonzero(~G.is_zero_v(C))
    coeffs = {}
    for mask in nz.tolist():
        mon = tuple(i for i in range(n) if mask >> i & 1)
        if d_max is not None and len(mon) > d_max:
            raise DegreeExceededError(d_max, mon)
        coeffs[mon] = C[mask]
    d = n if d_max is None else d_max
    return MultilinearPoly(G, n, d, coeffs)


def disagreements(f: Table, g: Table) -> int:
    if f.group != g.group:
        raise GroupMismatchError(f"{f.group} vs {g.group}")
    if f.n != g.n:
        raise ValueError(f"dimension mismatch {f.n} vs {g.n}")
    return int((~f.group.eq_v(f.values, g.values)).sum())


def exact_distance(f: Table, g: Table) -> Fraction:
    return Fraction(disagreements(f, g), 1 << f.n)


# -- restriction --------------------------------------------------------

def restrict(P: MultilinearPoly, emb) -> MultilinearPoly:
    """``P`` composed with ``y ↦ embed(emb, y)``, as a polynomial in k variables.

    Each ``x_i`` becomes ``y_{h(i)}`` or ``1 − y_{h(i)}``; a monomial that needs
    both forms of one ``y_j`` vanishes, and ``Π_{j∈A}(1 − y_j)`` expands into
    signed subset monomials.
    """
    if emb.n != P.n:
        raise ValueError(f"embedding dimension {emb.n} != polynomial dimension {P.n}")
    G = P.group
    a, h = emb.a, emb.h
    out: Dict[Monomial, Any] = {}
    for mon, c in P.coeffs.items():
        pos, negs = set(), set()
        for i in mon:
            (negs if a[i] else pos).add(int(h[i]))
        if pos & negs:
            continue
        negs_sorted = sorted(negs)
        for r in range(len(negs_sorted) + 1):
            term = G.mul(-1, c) if r % 2 else c
            for S in itertools.combinations(negs_sorted, r):
                m = tuple(sorted(pos.union(S)))
                out[m] = G.add(out.get(m, G.zero), term)
    return MultilinearPoly(G, emb.k, min(P.d, emb.k), out)


# -- Hamming-ball interpolation -----------------------------------------

def ball_interpolation_coeffs(k: int, d: int, center: PointLike) -> List[Tuple[Tuple[int, ...], int]]:
    """Integer weights α_b on the radius-d ball around ``center`` with
    ``P(0^k) = Σ α_b P(b)`` for every degree-≤d multilinear ``P``.

    Only points below the center (b = c ⊕ 1_J with J inside the support S of
    c, |J| ≤ d) are used. Restricted to the cube on S, the weight of b is
    ``Σ_{t ≤ d−|J|} (−1)^t C(|S|−|J|, t)``; it cancels every monomial of
    degree ≤ d except the constant.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    if k < d:
        raise ValueError(f"k={k} < d={d}")
    c = as_point(center, k)
    S = [i for i in range(k) if c[i]]
    s = len(S)
    out = []
    for size in range(min(d, s) + 1):
        alpha = sum((-1) ** t * math.comb(s - size, t) for t in range(d - size + 1))
        if alpha == 0:
            continue
        for J in itertools.combinations(S, size):
            b = c.copy()
            b[list(J)] = 0
            out.append((tuple(int(v) for v in b), alpha))
    return out


# -- random polynomials -------------------------------------------------

def monomials(n: int, d: int) -> List[Monomial]:
    return [m for r in range(d + 1) for m in itertools.combinations(range(n), r)]


def random_poly(group: Group, n: int, d: int, rng: SeedLike, density: float = 1.0) -> MultilinearPoly:
    """Each monomial of degree ≤ d gets a uniform coefficient with prob ``density``."""
    rng = as_rng(rng)
    coeffs = {}
    for m in monomials(n, d):
        if density >= 1.0 or rng.random() < density:
            coeffs[m] = group.random_element(rng)
    return MultilinearPoly(group, n, d, coeffs)


def random_linear(group: Group, n: int, rng: SeedLike) -> MultilinearPoly:
    """Uniform degree-1 polynomial; vectorized for cyclic and integer groups so n = 10^5 is cheap."""
    rng = as_rng(rng)
    if group.kind in ("cyclic", "integers"):
        vals = (rng.integers(group.m, size=n + 1) if group.kind == "cyclic" else rng.integers(-100, 101, size=n + 1)).tolist()
        coeffs = {(): vals[0]}
        coeffs.update({(i,): v for i, v in enumerate(vals[1:])})
        return MultilinearPoly(group, n, 1, coeffs)
    return random_poly(group, n, 1, rng)
