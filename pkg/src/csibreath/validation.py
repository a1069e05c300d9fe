"""Input validation helpers used by the public API."""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError


def require(condition: bool, message: str) -> None:
    """Raise ValidationError with ``message`` unless ``condition`` holds."""
    if not condition:
        raise ValidationError(message)


def check_finite(arr: np.ndarray, name: str = "array") -> None:
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains NaN or Inf entries")


def as_series(x, *, min_length: int = 1, allow_complex: bool = True,
              name: str = "series") -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 or complex128 array."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValidationError(
            f"{name} must have at least {min_length} samples, got {arr.size}")
    if np.iscomplexobj(arr):
        if not allow_complex:
            raise ValidationError(f"{name} must be real-valued")
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    check_finite(arr, name)
    return arr


def as_real_series(x, *, min_length: int = 1, name: str = "series") -> np.ndarray:
    return as_series(x, min_length=min_length, allow_complex=False, name=name)


def as_phase_tensor(x, name: str = "phase tensor") -> np.ndarray:
    """Coerce ``x`` to a finite real 4-D [T, N_T, N_R-1, M] tensor."""
    arr = np.asarray(x)
    if arr.ndim != 4:
        raise ValidationError(f"{name} must be 4-D, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        raise ValidationError(f"{name} must be real-valued")
    arr = arr.astype(np.float64, copy=False)
    check_finite(arr, name)
    return arr


def check_positive(value: float, name: str) -> None:
    require(value > 0, f"{name} must be positive, got {value!r}")
