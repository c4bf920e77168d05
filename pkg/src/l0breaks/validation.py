"""Input validation helpers shared by the estimator, solvers and CLI."""

from __future__ import annotations

import numpy as np


def check_time_series(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Coerce a regression sample to float64 arrays and validate shapes.

    Parameters
    ----------
    X : array-like of shape (T, p) or (T,)
        Regressor matrix; a 1-d array is treated as a single column.
    y : array-like of shape (T,)
        Response series.

    Returns
    -------
    tuple of ndarray
        ``(X, y)`` with ``X`` of shape (T, p) and ``y`` of shape (T,),
        both float64 and C-contiguous.

    Raises
    ------
    ValueError
        On dimension mismatch, fewer than two observations, or
        non-finite entries.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    if y.ndim != 1:
        raise ValueError(f"y must be 1-dimensional, got shape {y.shape}")
    if X.shape[0] != y.shape[0]:
        raise ValueError(
            f"X has {X.shape[0]} rows but y has {y.shape[0]} observations"
        )
    if y.shape[0] < 2:
        raise ValueError("need at least two observations")
    if X.shape[1] < 1:
        raise ValueError("X must have at least one column")
    if not np.isfinite(X).all():
        raise ValueError("X contains non-finite entries")
    if not np.isfinite(y).all():
        raise ValueError("y contains non-finite entries")
    return X, y


def check_breaks(breaks, n_obs: int) -> tuple[int, ...]:
    """Validate a strictly increasing break sequence for a length-T sample.

    A break at index ``b`` (0-based) starts a new regime at observation
    ``b``, so admissible values lie strictly inside ``(0, n_obs)``.
    """
    out = tuple(int(b) for b in breaks)
    for b in out:
        if not 0 < b < n_obs:
            raise ValueError(f"break index {b} outside open interval (0, {n_obs})")
    if any(b2 <= b1 for b1, b2 in zip(out, out[1:])):
        raise ValueError(f"break indices must be strictly increasing, got {out}")
    return out


def check_min_gap(min_gap: int) -> int:
    min_gap = int(min_gap)
    if min_gap < 2:
        raise ValueError(f"min_gap must be >= 2, got {min_gap}")
    return min_gap


def max_feasible_breaks(n_obs: int, min_gap: int) -> int:
    """Largest break count such that all resulting regimes can have
    length >= min_gap."""
    return max(n_obs // min_gap - 1, 0)
