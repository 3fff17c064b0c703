"""Query oracles with exact accounting, and corruption models.

Oracles are batch-first: ``query_many`` takes an ``(N, n)`` bit matrix and
returns an array of payloads, charging N queries. Corruption membership is a
keyed hash of the point, so a δ-corrupted oracle over n = 10^5 needs no table
and answers identically on replay.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from .bits import PointLike, as_point, as_points, bits_to_int, cube_indices, pack_words, weights
from .groups import Group, GroupValue, group_from_json
from .poly import MultilinearPoly, Table, evaluate_many, random_linear, random_poly
from .seeds import substream


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def point_hash(X: np.ndarray, key: int) -> np.ndarray:
    """Keyed 64-bit hash of each row of a bit matrix."""
    words = pack_words(X)
    with np.errstate(over="ignore"):
        seed = _mix64(np.array([key & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64) + np.uint64(0x9E3779B97F4A7C15))
        h = np.repeat(seed, words.shape[0])
        for j in range(words.shape[1]):
            h = _mix64(h ^ words[:, j]) + np.uint64(0x9E3779B97F4A7C15 * (j + 1) & 0xFFFFFFFFFFFFFFFF)
        return _mix64(h)


class QueryOracle:
    """Base oracle. Subclasses implement ``_answer(X)``."""

    def __init__(self, group: Group, n: int, truth: Optional[MultilinearPoly] = None):
        self.group = group
        self.n = int(n)
        self.truth = truth
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def _charge(self, m: int) -> None:
        with self._lock:
            self._count += m

    def _answer(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def query_many(self, X) -> np.ndarray:
        X = as_points(X, self.n)
        self._charge(X.shape[0])
        return self._answer(X)

    def query(self, x: PointLike) -> GroupValue:
        x = as_point(x, self.n)
        return GroupValue(self.group, self.query_many(x[None, :])[0])

    def table(self, budget: int = 20) -> Table:
        """Full evaluation table (charges 2^n queries)."""
        if self.n > budget:
            raise ValueError(f"n={self.n} exceeds the tabulation budget {budget}")
        return Table(self.group, self.n, self.query_many(cube_indices(self.n)))


class FunctionOracle(QueryOracle):
    """Wraps a batch function ``(N, n) bits -> payload array``."""

    def __init__(self, group: Group, n: int, fn: Callable[[np.ndarray], np.ndarray], truth=None):
        super().__init__(group, n, truth)
        self._fn = fn

    def _answer(self, X):
        return self._fn(X)


class TableOracle(QueryOracle):
    def __init__(self, table: Table, truth=None):
        super().__init__(table.group, table.n, truth)
        self._values = table.values
        self._pow = (1 << np.arange(table.n)).astype(np.int64)

    def _answer(self, X):
        return self._values[X.astype(np.int64) @ self._pow]


# -- error models ---------------------------------------------------------

class ErrorModel:
    kind = "none"

    def apply(self, X: np.ndarray, clean: np.ndarray, group: Group) -> np.ndarray:
        return clean

    def corrupted(self, X: np.ndarray, group: Group, truth: MultilinearPoly) -> np.ndarray:
        """Boolean mask of points where the oracle differs from ``truth``."""
        clean = evaluate_many(truth, X)
        return ~group.eq_v(self.apply(X, clean, group), clean)


@dataclass(frozen=True)
class NoErrors(ErrorModel):
    kind = "none"


@dataclass(frozen=True)
class RandomDensity(ErrorModel):
    """Point x is corrupted iff ``hash(x, key) < δ·2^64``; value = truth + offset."""

    delta: float
    key: int = 0
    offset: Any = None
    kind = "random_density"

    def __post_init__(self):
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")

    def mask(self, X: np.ndarray) -> np.ndarray:
        if self.delta >= 1:
            return np.ones(X.shape[0], dtype=bool)
        thr = np.uint64(int(self.delta * 2.0**64))
        return point_hash(X, self.key) < thr

    def apply(self, X, clean, group):
        off = group.nonzero_element() if self.offset is None else group.coerce(self.offset)
        m = self.mask(X)
        return group.add_v(clean, group.mask_v(m, off))


@dataclass(frozen=True)
class ExplicitSet(ErrorModel):
    """Listed points (as ints, bit i = coordinate i) take the given values."""

    values: Dict[int, Any] = field(default_factory=dict)
    kind = "explicit_set"

    def apply(self, X, clean, group):
        if not self.values:
            return clean
        out = clean.copy()
        for r, x in enumerate(X):
            v = self.values.get(bits_to_int(x))
            if v is not None:
                out[r] = group.coerce(v)
        return out


@dataclass(frozen=True)
class BandAdversary(ErrorModel):
    """Truth on weights in ``[n/2 − width, n/2 + width]``; outside, truth + offset
    (or the fixed ``constant`` when given)."""

    width: float
    offset: Any = None
    constant: Any = None
    kind = "band_adversary"

    def outside(self, X: np.ndarray) -> np.ndarray:
        w = weights(X)
        n = X.shape[1]
        return (2 * w < n - 2 * self.width) | (2 * w > n + 2 * self.width)

    def apply(self, X, clean, group):
        m = self.outside(X)
        if self.constant is not None:
            return np.where(m, group.mask_v(True, group.coerce(self.constant)), clean)
        off = group.nonzero_element() if self.offset is None else group.coerce(self.offset)
        return group.add_v(clean, group.mask_v(m, off))


@dataclass(frozen=True)
class PlantedPair(ErrorModel):
    """``f(x) = P1(x)`` when ``x_selector = 1`` else ``P2(x)``; P1 is the oracle's truth."""

    other: MultilinearPoly
    selector: int = 0
    kind = "planted_pair"

    def apply(self, X, clean, group):
        sel = X[:, self.selector].astype(bool)
        return np.where(sel, clean, evaluate_many(self.other, X))


class CorruptedOracle(QueryOracle):
    def __init__(self, truth: MultilinearPoly, model: ErrorModel = NoErrors()):
        super().__init__(truth.group, truth.n, truth)
        self.model = model

    def _answer(self, X):
        return self.model.apply(X, evaluate_many(self.truth, X), self.group)


# -- construction from JSON -----------------------------------------------

def _truth_from_json(obj, group: Group, n: int, seed: int) -> MultilinearPoly:
    if "terms" in obj:
        P = MultilinearPoly.from_json(obj, group)
        if P.n != n:
            raise ValueError(f"truth has n={P.n}, oracle has n={n}")
        return P
    if "random" in obj:
        d = int(obj["random"].get("d", 1))
        rng = substream(seed, "truth")
        return random_linear(group, n, rng) if d == 1 else random_poly(group, n, d, rng)
    raise ValueError("truth must be polynomial JSON or {'random': {'d': D}}")


def make_oracle(spec: dict) -> CorruptedOracle:
    """Oracle from JSON::

        {"group": {"kind": "cyclic", "m": 2}, "n": 64, "seed": 1,
         "truth": {"random": {"d": 1}} | <polynomial JSON>,
         "error": {"kind": "random_density", "delta": 0.1, "key": 5}}
    """
    for key in ("group", "n", "truth"):
        if key not in spec:
            raise ValueError(f"oracle spec missing {key!r}")
    group = group_from_json(spec["group"])
    n = int(spec["n"])
    if n < 1:
        raise ValueError("n must be >= 1")
    seed = int(spec.get("seed", 0))
    truth = _truth_from_json(spec["truth"], group, n, seed)
    err = spec.get("error", {"kind": "none"})
    kind = err.get("kind", "none")
    if kind == "none":
        model: ErrorModel = NoErrors()
    elif kind == "random_density":
        off = err.get("offset")
        model = RandomDensity(float(err["delta"]), int(err.get("key", seed)), None if off is None else group.from_json(off))
    elif kind == "explicit_set":
        vals = {}
        for item in err.get("points", []):
            x = as_point(item["point"], n)
            vals[bits_to_int(x)] = group.from_json(item["value"])
        model = ExplicitSet(vals)
    elif kind == "band_adversary":
        off, const = err.get("offset"), err.get("constant")
        model = BandAdversary(
            float(err["width"]),
            None if off is None else group.from_json(off),
            None if const is None else group.from_json(const),
        )
    elif kind == "planted_pair":
        other = _truth_from_json(err["other"], group, n, seed + 1)
        model = PlantedPair(other, int(err.get("selector", 0)))
    else:
        raise ValueError(f"unknown error model {kind!r}")
    return CorruptedOracle(truth, model)


def maj_instance(t: int, n: int, g: GroupValue) -> FunctionOracle:
    """``g`` when more than t/2 of x_0..x_{t−1} are set, zero otherwise."""
    if t < 1 or t % 2 == 0 or t > n:
        raise ValueError("need odd t with 1 <= t <= n")
    if g.is_zero():
        raise ValueError("g must be nonzero")
    G = g.group

    def fn(X):
        return G.mask_v(2 * X[:, :t].sum(axis=1, dtype=np.int64) > t, g.payload)

    return FunctionOracle(G, n, fn)
