"""Levy-Attack utils."""
from __future__ import annotations

from typing import Any

import numpy as np

from .exceptions import DomainError
from .models import Bounds, DataPoint


def as_datapoint(value: Any) -> DataPoint:
    """Convert to a flat float64 vector."""
    point = np.asarray(value, dtype=np.float64)
    if point.ndim != 1:
        point = point.reshape(-1)
    return point


def clip_to_bounds(point: DataPoint, bounds: Bounds) -> DataPoint:
    """Clip every coordinate into [low, high]."""
    low, high = bounds
    return np.clip(point, low, high)


def within_bounds(point: DataPoint, bounds: Bounds) -> bool:
    """Check that every coordinate lies in [low, high]."""
    low, high = bounds
    return bool(np.all(point >= low) and np.all(point <= high))


def derive_seed(master_seed: int, index: int) -> int:
    """Derive an order-independent 64-bit seed for one sample."""
    if master_seed < 0 or index < 0:
        raise DomainError("seeds and sample indices must be non-negative")
    sequence = np.random.SeedSequence([master_seed, index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    """Create the random stream for a 64-bit seed."""
    return np.random.default_rng(seed)
