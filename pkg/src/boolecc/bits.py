"""Point encodings.

A point of {0,1}^n is a length-n ``uint8`` array; batches are ``(N, n)``
arrays. Coordinate ``i`` is character ``i`` of a bitstring and bit ``i`` of
a Python int, so tables over {0,1}^k are indexed by ``Σ_j y_j 2^j``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence, Union

import numpy as np

PointLike = Union[str, int, Sequence[int], np.ndarray]


def as_point(x: PointLike, n: int) -> np.ndarray:
    """Normalize ``x`` to a length-``n`` uint8 vector."""
    if isinstance(x, str):
        if len(x) != n or set(x) - {"0", "1"}:
            raise ValueError(f"expected a bitstring of length {n}, got {x!r}")
        return np.frombuffer(x.encode(), dtype=np.uint8) - ord("0")
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        x = int(x)
        if x < 0 or x >> n:
            raise ValueError(f"{x} does not fit in {n} bits")
        return int_to_bits(x, n)
    arr = np.asarray(x)
    if arr.shape != (n,):
        raise ValueError(f"point has shape {arr.shape}, expected ({n},)")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("point coordinates must be 0 or 1")
    return arr.astype(np.uint8)


def as_points(X, n: int) -> np.ndarray:
    arr = np.asarray(X, dtype=np.uint8)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise ValueError(f"points have shape {arr.shape}, expected (N, {n})")
    return arr


def int_to_bits(x: int, n: int) -> np.ndarray:
    raw = x.to_bytes((n + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].copy()


def bits_to_int(bits) -> int:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def to_bitstring(bits) -> str:
    return (np.asarray(bits, dtype=np.uint8) + ord("0")).tobytes().decode()


def pack_words(X: np.ndarray) -> np.ndarray:
    """Pack an ``(N, n)`` bit matrix into ``(N, W)`` little-endian uint64 words."""
    N, n = X.shape
    W = max(1, -(-n // 64))
    packed = np.packbits(X, axis=1, bitorder="little")
    if packed.shape[1] != 8 * W:
        packed = np.pad(packed, ((0, 0), (0, 8 * W - packed.shape[1])))
    return np.ascontiguousarray(packed).view("<u8").reshape(N, W)


@lru_cache(maxsize=32)
def cube_indices(k: int) -> np.ndarray:
    """All points of {0,1}^k as a read-only ``(2^k, k)`` matrix; row ``y`` has bit j = y_j."""
    y = np.arange(1 << k, dtype=np.int64)
    out = ((y[:, None] >> np.arange(k)) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


def weights(X: np.ndarray) -> np.ndarray:
    return X.sum(axis=-1, dtype=np.int64)
