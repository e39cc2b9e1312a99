"""
Validation utilities for numeric inputs.

The validate_* functions answer a yes/no question; the require_* functions
raise MinMaxInputError with a message naming the offending argument.
"""

import math
from typing import Sequence

import numpy as np

from project.src.utils.error_utils import MinMaxInputError


def validate_finite(values) -> bool:
    """
    Checks that every entry of an array-like is a finite real number.

    Args:
        values: scalar or array-like

    Returns:
        bool: True if all entries are finite, False otherwise
    """
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        return False
    return bool(np.all(np.isfinite(arr)))


def validate_box(lower: Sequence[float], upper: Sequence[float]) -> bool:
    """
    Checks that an axis-aligned box has finite bounds and positive volume.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0:
        return False
    if not (validate_finite(lo) and validate_finite(hi)):
        return False
    return bool(np.all(hi > lo))


def require_finite(name: str, values) -> np.ndarray:
    """Returns values as a float array or raises if any entry is not finite."""
    if not validate_finite(values):
        raise MinMaxInputError(f"{name} must contain only finite real numbers, got {values!r}")
    return np.asarray(values, dtype=float)


def require_positive(name: str, value: float) -> float:
    """Returns value as float or raises unless it is finite and > 0."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise MinMaxInputError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value) or value <= 0.0:
        raise MinMaxInputError(f"{name} must be > 0, got {value}")
    return value


def require_count(name: str, value: int, minimum: int = 1) -> int:
    """Returns value as int or raises unless it is an integer >= minimum."""
    if isinstance(value, bool) or int(value) != value:
        raise MinMaxInputError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise MinMaxInputError(f"{name} must be >= {minimum}, got {value}")
    return value


def require_length(name: str, values: np.ndarray, expected: int) -> np.ndarray:
    """Raises unless a 1-D vector has the expected length."""
    if values.ndim != 1 or values.shape[0] != expected:
        raise MinMaxInputError(
            f"{name} has dimension {values.shape[0] if values.ndim == 1 else values.shape}, expected {expected}"
        )
    return values
