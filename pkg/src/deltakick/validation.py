"""Input checks shared by the estimator API."""
from __future__ import annotations

import numbers

import numpy as np

from .errors import PreconditionError


def check_wavefunctions(X, grid, norm_tolerance=1e-10) -> np.ndarray:
    """Return X as a 2-D complex array of normalised rows sampled on ``grid``.

    A single 1-D wavefunction is promoted to one row.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise PreconditionError(f"expected a 2-D array of wavefunctions, got shape {X.shape}")
    if X.shape[1] != grid.num_points:
        raise PreconditionError(
            f"wavefunctions have {X.shape[1]} samples, grid has {grid.num_points}")
    if not np.issubdtype(X.dtype, np.number):
        raise PreconditionError(f"wavefunctions must be numeric, got dtype {X.dtype}")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise PreconditionError("wavefunctions contain NaN or inf")
    norms = np.sum(np.abs(X) ** 2, axis=1) * grid.spacing
    bad = np.flatnonzero(np.abs(norms - 1.0) > norm_tolerance)
    if bad.size:
        raise PreconditionError(
            f"row {bad[0]} has norm {norms[bad[0]]!r}; rows must be normalised on the grid")
    return X


def check_widths(widths, name="widths") -> tuple[float, ...]:
    if isinstance(widths, numbers.Real):
        widths = (widths,)
    out = tuple(float(w) for w in widths)
    if not out or any(not np.isfinite(w) or w <= 0 for w in out):
        raise PreconditionError(f"{name} must be a non-empty list of positive numbers")
    return out


def check_scalar(value, name, min_value=None, include_min=True) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise PreconditionError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise PreconditionError(f"{name} must be finite")
    if min_value is not None:
        if value < min_value or (value == min_value and not include_min):
            op = ">=" if include_min else ">"
            raise PreconditionError(f"{name} must be {op} {min_value}, got {value!r}")
    return value
