"""Abelian groups used as coefficient ranges.

Elements are plain, canonical Python payloads owned by a group object:
residues for ``Cyclic``, ints for ``Integers``, reduced ``Fraction`` for
``Rationals`` and tuples for ``Product``. Hot loops work on payloads (and on
numpy arrays of payloads through the ``*_v`` methods); ``GroupValue`` is the
boxed form for user code, with operators and cross-group checks.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Iterator, Sequence

import numpy as np

INFINITE = math.inf


class GroupMismatchError(ValueError):
    pass


def objarray(values: Iterable[Any]) -> np.ndarray:
    values = list(values)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


class Group:
    """Base class. Subclasses are frozen dataclasses, so equal specs compare equal."""

    kind: str = ""
    dtype: Any = object

    # -- scalar payload operations -------------------------------------
    @property
    def zero(self) -> Any:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, n: int, a):
        """``n·a`` by double-and-add; negative ``n`` goes through the inverse."""
        n = int(n)
        if n < 0:
            n, a = -n, self.neg(a)
        acc, base = self.zero, a
        while n:
            if n & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            n >>= 1
        return acc

    def order(self, a):
        raise NotImplementedError

    def coerce(self, x):
        """Validate ``x`` and return its canonical payload."""
        raise NotImplementedError

    def sort_key(self, a):
        raise NotImplementedError

    def serialize(self, a) -> str:
        raise NotImplementedError

    def to_json(self, a):
        raise NotImplementedError

    def from_json(self, obj):
        return self.coerce(obj)

    def spec_json(self) -> dict:
        raise NotImplementedError

    def random_element(self, rng: np.random.Generator):
        raise NotImplementedError

    def nonzero_element(self):
        raise NotImplementedError

    @property
    def size(self) -> float:
        return INFINITE

    @property
    def is_finite(self) -> bool:
        return self.size != INFINITE

    def elements(self) -> Iterator[Any]:
        raise ValueError(f"{self} is infinite")

    # -- vectorized operations over numpy arrays of payloads ----------
    def asarray(self, values: Iterable[Any]) -> np.ndarray:
        return objarray(values)

    def zeros(self, shape) -> np.ndarray:
        out = np.empty(shape, dtype=object)
        out.fill(self.zero)
        return out

    def add_v(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.frompyfunc(self.add, 2, 1)(a, b)

    def neg_v(self, a: np.ndarray) -> np.ndarray:
        return np.frompyfunc(self.neg, 1, 1)(a)

    def sub_v(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.frompyfunc(self.sub, 2, 1)(a, b)

    def scale_v(self, n: int, a: np.ndarray) -> np.ndarray:
        return np.frompyfunc(lambda x: self.mul(n, x), 1, 1)(a)

    def smul_v(self, counts: np.ndarray, g) -> np.ndarray:
        """Elementwise ``counts[i]·g`` for a single element ``g``."""
        return np.frompyfunc(lambda c: self.mul(int(c), g), 1, 1)(counts)

    def lincomb_v(self, coeffs: Sequence[int], values: np.ndarray) -> np.ndarray:
        """``Σ_j coeffs[j]·values[..., j]`` along the last axis."""
        acc = self.zeros(values.shape[:-1])
        for j, c in enumerate(coeffs):
            if c:
                acc = self.add_v(acc, self.scale_v(c, values[..., j]))
        return acc

    def lin_bits(self, bits: np.ndarray, coeffs: Sequence[Any]) -> np.ndarray:
        """``Σ_i bits[:, i]·coeffs[i]`` for a 0/1 matrix (one row per point)."""
        acc = self.zeros(bits.shape[0])
        for i, c in enumerate(coeffs):
            if c != self.zero:
                acc = self.add_v(acc, self.smul_v(bits[:, i], c))
        return acc

    def eq_v(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise equality of two same-shaped payload arrays."""
        return np.asarray(a == b, dtype=bool)

    def is_zero_v(self, a: np.ndarray) -> np.ndarray:
        z = self.zero
        return np.frompyfunc(lambda x: x == z, 1, 1)(a).astype(bool)

    def mask_v(self, mask: np.ndarray, g: np.ndarray) -> np.ndarray:
        """``g`` where ``mask`` holds, zero elsewhere (broadcasting)."""
        if isinstance(g, tuple):
            # a product payload must not be broadcast as a vector
            box = np.empty((), dtype=object)
            box[()] = g
            g = box
        return np.where(mask, g, self.zeros(()))


@dataclass(frozen=True)
class Cyclic(Group):
    m: int
    kind = "cyclic"
    dtype = np.int64

    def __post_init__(self):
        if int(self.m) < 1:
            raise ValueError("cyclic modulus must be >= 1")

    @property
    def zero(self):
        return 0

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def mul(self, n, a):
        return (int(n) * a) % self.m

    def order(self, a):
        return self.m // math.gcd(a, self.m)

    def coerce(self, x):
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise TypeError(f"cyclic({self.m}) element must be an int, got {x!r}")
        x = int(x)
        if not 0 <= x < self.m:
            raise ValueError(f"{x} is not a canonical residue mod {self.m}")
        return x

    def sort_key(self, a):
        return a

    def serialize(self, a):
        return str(a)

    def to_json(self, a):
        return int(a)

    def spec_json(self):
        return {"kind": "cyclic", "m": self.m}

    def random_element(self, rng):
        return int(rng.integers(self.m))

    def nonzero_element(self):
        if self.m == 1:
            raise ValueError("cyclic(1) has no nonzero element")
        return 1

    @property
    def size(self):
        return self.m

    def elements(self):
        return iter(range(self.m))

    def asarray(self, values):
        return np.asarray(list(values), dtype=np.int64)

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def add_v(self, a, b):
        return (a + b) % self.m

    def neg_v(self, a):
        return (-a) % self.m

    def sub_v(self, a, b):
        return (a - b) % self.m

    def scale_v(self, n, a):
        return (a * (int(n) % self.m)) % self.m

    def smul_v(self, counts, g):
        return (np.asarray(counts, dtype=np.int64) % self.m) * g % self.m

    def lincomb_v(self, coeffs, values):
        c = np.array([int(x) % self.m for x in coeffs], dtype=np.int64)
        return (values.astype(np.int64) @ c) % self.m

    def lin_bits(self, bits, coeffs):
        c = np.asarray(coeffs, dtype=np.int64)
        bound = len(c) * (self.m - 1)
        # BLAS float products are exact while every partial sum stays below the mantissa
        if bound < 2**24:
            return (bits.astype(np.float32) @ c.astype(np.float32)).astype(np.int64) % self.m
        if bound < 2**53:
            return (bits.astype(np.float64) @ c.astype(np.float64)).astype(np.int64) % self.m
        return (bits.astype(np.int64) @ c) % self.m

    def is_zero_v(self, a):
        return a == 0


@dataclass(frozen=True)
class Integers(Group):
    kind = "integers"

    @property
    def zero(self):
        return 0

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, n, a):
        return int(n) * a

    def order(self, a):
        return 1 if a == 0 else INFINITE

    def coerce(self, x):
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise TypeError(f"integer element must be an int, got {x!r}")
        return int(x)

    def sort_key(self, a):
        return a

    def serialize(self, a):
        return str(a)

    def to_json(self, a):
        return int(a)

    def spec_json(self):
        return {"kind": "integers"}

    def random_element(self, rng, bound: int = 100):
        return int(rng.integers(-bound, bound + 1))

    def nonzero_element(self):
        return 1

    def add_v(self, a, b):
        return a + b

    def neg_v(self, a):
        return -a

    def sub_v(self, a, b):
        return a - b

    def scale_v(self, n, a):
        return a * int(n)

    def smul_v(self, counts, g):
        return objarray(int(c) * g for c in np.asarray(counts).ravel()).reshape(np.shape(counts))

    def lincomb_v(self, coeffs, values):
        acc = self.zeros(values.shape[:-1])
        for j, c in enumerate(coeffs):
            if c:
                acc = acc + values[..., j] * int(c)
        return acc

    def lin_bits(self, bits, coeffs):
        coeffs = [int(c) for c in coeffs]
        bound = max((abs(c) for c in coeffs), default=0) * max(len(coeffs), 1)
        if bound < 2**62:
            vals = bits.astype(np.int64) @ np.asarray(coeffs, dtype=np.int64)
            return objarray(int(v) for v in vals)
        return bits.astype(object) @ objarray(coeffs)


@dataclass(frozen=True)
class Rationals(Group):
    """Exact stand-in for the reals: equality must be decidable."""

    kind = "rationals"

    @property
    def zero(self):
        return Fraction(0)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, n, a):
        return int(n) * a

    def order(self, a):
        return 1 if a == 0 else INFINITE

    def coerce(self, x):
        if isinstance(x, (bool, np.bool_)):
            raise TypeError("booleans are not rationals")
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
        if isinstance(x, (int, np.integer, Fraction, str)):
            return Fraction(x) if not isinstance(x, np.integer) else Fraction(int(x))
        raise TypeError(f"cannot read {x!r} as a rational")

    def sort_key(self, a):
        return a

    def serialize(self, a):
        return str(a)

    def to_json(self, a):
        return a.numerator if a.denominator == 1 else str(a)

    def spec_json(self):
        return {"kind": "rationals"}

    def random_element(self, rng):
        return Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 7)))

    def nonzero_element(self):
        return Fraction(1)

    def scale_v(self, n, a):
        return a * int(n)


@dataclass(frozen=True)
class Product(Group):
    parts: tuple

    kind = "product"

    def __post_init__(self):
        if len(self.parts) < 1:
            raise ValueError("product arity must be >= 1")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def zero(self):
        return tuple(p.zero for p in self.parts)

    def add(self, a, b):
        return tuple(p.add(x, y) for p, x, y in zip(self.parts, a, b))

    def neg(self, a):
        return tuple(p.neg(x) for p, x in zip(self.parts, a))

    def sub(self, a, b):
        return tuple(p.sub(x, y) for p, x, y in zip(self.parts, a, b))

    def mul(self, n, a):
        return tuple(p.mul(n, x) for p, x in zip(self.parts, a))

    def order(self, a):
        orders = [p.order(x) for p, x in zip(self.parts, a)]
        if INFINITE in orders:
            return INFINITE
        return reduce(math.lcm, orders, 1)

    def coerce(self, x):
        if not isinstance(x, (tuple, list)) or len(x) != len(self.parts):
            raise TypeError(f"product element must have {len(self.parts)} components, got {x!r}")
        return tuple(p.coerce(v) for p, v in zip(self.parts, x))

    def sort_key(self, a):
        return tuple(p.sort_key(x) for p, x in zip(self.parts, a))

    def serialize(self, a):
        return "(" + ",".join(p.serialize(x) for p, x in zip(self.parts, a)) + ")"

    def to_json(self, a):
        return [p.to_json(x) for p, x in zip(self.parts, a)]

    def from_json(self, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != len(self.parts):
            raise TypeError(f"product element must be a list of {len(self.parts)} components")
        return tuple(p.from_json(v) for p, v in zip(self.parts, obj))

    def spec_json(self):
        return {"kind": "product", "parts": [p.spec_json() for p in self.parts]}

    def random_element(self, rng):
        return tuple(p.random_element(rng) for p in self.parts)

    def nonzero_element(self):
        for i, p in enumerate(self.parts):
            try:
                g = p.nonzero_element()
            except ValueError:
                continue
            out = list(self.zero)
            out[i] = g
            return tuple(out)
        raise ValueError("trivial product group has no nonzero element")

    @property
    def size(self):
        return math.prod(p.size for p in self.parts)

    def elements(self):
        import itertools

        return iter(itertools.product(*(list(p.elements()) for p in self.parts)))

    def asarray(self, values):
        return objarray(values)


def group_from_json(obj: dict) -> Group:
    kind = obj.get("kind")
    if kind == "cyclic":
        return Cyclic(int(obj["m"]))
    if kind == "integers":
        return Integers()
    if kind == "rationals":
        return Rationals()
    if kind == "product":
        return Product(tuple(group_from_json(p) for p in obj["parts"]))
    raise ValueError(f"unknown group kind {kind!r}")


def plurality(group: Group, values: Iterable[Any]):
    """Most frequent payload; ties go to the smallest canonical sort key."""
    if not isinstance(values, np.ndarray):
        values = group.asarray(values)
    if isinstance(group, Cyclic):
        counts = np.bincount(values.astype(np.int64).ravel(), minlength=group.m)
        return int(np.argmax(counts))  # argmax picks the smallest residue on ties
    counts = Counter(values.ravel().tolist())
    best = max(counts.values())
    return min((v for v, c in counts.items() if c == best), key=group.sort_key)


@dataclass(frozen=True)
class GroupValue:
    group: Group
    payload: Any

    @classmethod
    def of(cls, group: Group, x) -> "GroupValue":
        return cls(group, group.coerce(x))

    def _check(self, other: "GroupValue") -> None:
        if not isinstance(other, GroupValue):
            raise TypeError(f"expected GroupValue, got {type(other).__name__}")
        if other.group != self.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")

    def __add__(self, other):
        self._check(other)
        return GroupValue(self.group, self.group.add(self.payload, other.payload))

    def __sub__(self, other):
        self._check(other)
        return GroupValue(self.group, self.group.sub(self.payload, other.payload))

    def __neg__(self):
        return GroupValue(self.group, self.group.neg(self.payload))

    def __rmul__(self, n):
        return scalar_multiply(n, self)

    def __str__(self):
        return self.group.serialize(self.payload)

    def is_zero(self) -> bool:
        return self.payload == self.group.zero


def zero(group: Group) -> GroupValue:
    return GroupValue(group, group.zero)


def scalar_multiply(n: int, g: GroupValue) -> GroupValue:
    if isinstance(n, (bool, np.bool_)) or not isinstance(n, (int, np.integer)):
        raise TypeError("scalar must be an integer")
    return GroupValue(g.group, g.group.mul(int(n), g.payload))


def element_order(g: GroupValue):
    """Smallest ``n >= 1`` with ``n·g = 0``, or ``INFINITE``."""
    return g.group.order(g.payload)
