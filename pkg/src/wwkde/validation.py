"""Input validation helpers shared across the package."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ContractViolation",
    "check_positive",
    "check_positive_int",
    "check_probability",
    "as_point",
    "as_point_batch",
]


class ContractViolation(ValueError):
    """An argument violates a documented precondition."""


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ContractViolation(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_positive_int(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ContractViolation(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_probability(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 < value < 1.0):
        raise ContractViolation(f"{name} must lie strictly inside (0, 1), got {value!r}")
    return value


def as_point(x, dim: int, name: str = "x") -> np.ndarray:
    """Coerce a single point to a float vector of length ``dim``."""
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size != dim:
        raise ContractViolation(f"{name} has dimension {arr.size}, expected {dim}")
    return arr


def as_point_batch(x, dim: int | None = None, name: str = "samples",
                   require_finite: bool = False) -> np.ndarray:
    """Coerce to a float array of shape (n, d).

    One-dimensional input is read as n scalar points when ``dim`` is 1 or
    unknown, and as a single d-vector when its length equals ``dim``.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        if dim is not None and dim > 1:
            if arr.size != dim:
                raise ContractViolation(
                    f"{name}: 1-d input of length {arr.size} does not match dimension {dim}")
            arr = arr.reshape(1, -1)
        else:
            arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be a 2-d array of points, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise ContractViolation(f"{name} has dimension {arr.shape[1]}, expected {dim}")
    if require_finite and not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ContractViolation(f"{name} contains a non-finite coordinate at row {bad[0]}")
    return arr
