"""Seed discipline.

Every random choice flows from one master seed. ``substream(seed, *labels)``
derives an independent generator for a labeled purpose, for example
``substream(7, "unique-correct", 12, "subcube")``; string labels are mapped
to 32-bit integers with CRC-32, integer labels are used as-is. The result
is ``SeedSequence(seed, spawn_key=labels)``, so equal labels replay exactly.
"""
from __future__ import annotations

import zlib
from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, None]


def _label(x) -> int:
    if isinstance(x, str):
        return zlib.crc32(x.encode())
    x = int(x)
    if x < 0:
        raise ValueError("integer labels must be non-negative")
    return x


def seed_sequence(seed: int, *labels) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(_label(x) for x in labels))


def substream(seed: int, *labels) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *labels))


def as_rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit integer seed, for handing randomness to code that wants an int."""
    return int(rng.integers(0, 2**63 - 1))
