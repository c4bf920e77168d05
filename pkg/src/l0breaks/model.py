"""Domain types for segmented time-series regression.

The model is a linear regression whose coefficient vector is piecewise
constant in time: regimes are maximal intervals on which the coefficients
do not move, and a break is the first index of a new regime.

Index convention used throughout the package: time is 0-based, a break at
index ``b`` means the regime ending at ``b - 1`` is followed by a new
regime starting at ``b``, and regimes are half-open windows ``[s, e)``.
External interfaces (CLI reports) translate to 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .validation import check_breaks, check_time_series

__all__ = [
    "Dataset",
    "Segmentation",
    "PenaltyConfig",
    "Certificate",
    "SolverResult",
    "BreakDiagnostics",
    "InfeasibleProblem",
    "BigMTooSmall",
    "recompute_objective",
    "diagnostics",
]


class InfeasibleProblem(ValueError):
    """No segmentation satisfies the requested configuration."""


class BigMTooSmall(RuntimeError):
    """A realized coefficient jump comes within 1% of the big-M bound.

    When the bound binds, the binary-coupled program may be minimizing a
    strictly constrained surrogate of the penalized objective, so the
    result is rejected instead of silently returned.
    """


@dataclass(frozen=True, eq=False)
class Dataset:
    """An observed series ``y`` with regressor rows ``x_t``.

    Attributes
    ----------
    y : ndarray of shape (T,)
    X : ndarray of shape (T, p)
    """

    y: np.ndarray
    X: np.ndarray

    def __post_init__(self) -> None:
        X, y = check_time_series(self.X, self.y)
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_obs(self) -> int:
        return self.y.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class Segmentation:
    """A break set together with one coefficient vector per regime.

    ``breaks`` holds 0-based regime start indices, strictly increasing and
    strictly inside ``(0, n_obs)``; ``coefs`` has shape (m + 1, p) where
    ``m = len(breaks)``. With the implicit boundaries 0 and ``n_obs``
    every regime is non-empty. Adjacent coefficient vectors are allowed to
    coincide here; solver outputs guarantee they differ.
    """

    breaks: tuple[int, ...]
    coefs: np.ndarray
    n_obs: int

    def __post_init__(self) -> None:
        breaks = check_breaks(self.breaks, self.n_obs)
        coefs = np.atleast_2d(np.asarray(self.coefs, dtype=np.float64))
        if coefs.shape[0] != len(breaks) + 1:
            raise ValueError(
                f"{len(breaks)} breaks require {len(breaks) + 1} coefficient "
                f"vectors, got {coefs.shape[0]}"
            )
        coefs = np.ascontiguousarray(coefs)
        coefs.flags.writeable = False
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "coefs", coefs)

    @property
    def n_breaks(self) -> int:
        return len(self.breaks)

    @property
    def bounds(self) -> tuple[int, ...]:
        """Regime boundaries including the endpoints: (0, b_1, ..., b_m, T)."""
        return (0, *self.breaks, self.n_obs)

    def regime_of(self, t: int) -> int:
        """Index of the regime containing observation ``t``."""
        if not 0 <= t < self.n_obs:
            raise ValueError(f"t={t} outside [0, {self.n_obs})")
        return int(np.searchsorted(np.asarray(self.breaks), t, side="right"))

    def coef_path(self) -> np.ndarray:
        """Per-observation coefficient matrix of shape (T, p)."""
        out = np.empty((self.n_obs, self.coefs.shape[1]))
        bounds = self.bounds
        for j in range(len(bounds) - 1):
            out[bounds[j] : bounds[j + 1]] = self.coefs[j]
        return out


@dataclass(frozen=True)
class PenaltyConfig:
    """Solver configuration: break penalty, big-M coupling and regime-length
    floor.

    ``min_gap`` is the smallest allowed regime length; 2 reproduces the
    no-consecutive-breaks constraint of the binary formulation, larger
    values extend it to longer lead windows. ``fixed_m`` switches the
    solver to the restricted problem with exactly that many breaks.
    """

    lam: float = 0.0
    big_m: float = 1.0
    min_gap: int = 2
    fixed_m: int | None = None

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if self.big_m <= 0:
            raise ValueError(f"big_m must be positive, got {self.big_m}")
        if self.min_gap < 2:
            raise ValueError(f"min_gap must be >= 2, got {self.min_gap}")
        if self.fixed_m is not None and self.fixed_m < 0:
            raise ValueError(f"fixed_m must be nonnegative, got {self.fixed_m}")

    def validate_for(self, n_obs: int) -> None:
        if self.fixed_m is not None:
            limit = n_obs // self.min_gap - 1
            if self.fixed_m > limit:
                raise ValueError(
                    f"fixed_m={self.fixed_m} infeasible: at most {limit} breaks "
                    f"fit into {n_obs} observations with min_gap={self.min_gap}"
                )


class Certificate(Enum):
    """Optimality status attached to a solver result."""

    PROVED_OPTIMAL = "proved_optimal"
    INCUMBENT_ONLY = "incumbent_only"


@dataclass(frozen=True, eq=False)
class SolverResult:
    """Solver output: attained objective, segmentation and certificate.

    ``objective`` is the penalized value SSE + lam * n_breaks actually
    attained (pure SSE for fixed-m solves). ``gap`` is the residual bound
    gap, zero under :attr:`Certificate.PROVED_OPTIMAL`. ``stats`` carries
    solver bookkeeping such as dp cells, nodes explored and wall time.
    """

    objective: float
    segmentation: Segmentation
    certificate: Certificate
    gap: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def n_breaks(self) -> int:
        return self.segmentation.n_breaks


@dataclass(frozen=True)
class BreakDiagnostics:
    """Smallest regime length and the extreme adjacent-coefficient jumps."""

    i_min: int
    j_min: float
    j_max: float


def recompute_objective(data: Dataset, seg: Segmentation, lam: float) -> float:
    """Penalized least-squares value of a segmentation.

    Returns sum_t (y_t - beta_t' x_t)^2 + lam * m, where beta_t is the
    coefficient vector of the regime containing t. Deterministic and
    independent of the solver code paths, which makes it usable as a
    round-trip check on reported objectives.
    """
    if seg.n_obs != data.n_obs:
        raise ValueError(
            f"segmentation covers {seg.n_obs} observations, data has {data.n_obs}"
        )
    if seg.coefs.shape[1] != data.n_features:
        raise ValueError(
            f"coefficient dimension {seg.coefs.shape[1]} does not match "
            f"p={data.n_features}"
        )
    resid = data.y - np.einsum("tj,tj->t", data.X, seg.coef_path())
    return float(resid @ resid) + float(lam) * seg.n_breaks


def diagnostics(seg: Segmentation, n_obs: int | None = None) -> BreakDiagnostics:
    """Minimum regime length and min/max Euclidean jump norms.

    Both jump norms are 0 by convention when the segmentation has no
    breaks.
    """
    if n_obs is not None and n_obs != seg.n_obs:
        raise ValueError(f"n_obs={n_obs} does not match segmentation ({seg.n_obs})")
    bounds = np.asarray(seg.bounds)
    i_min = int(np.diff(bounds).min())
    if seg.n_breaks == 0:
        return BreakDiagnostics(i_min=i_min, j_min=0.0, j_max=0.0)
    jumps = np.linalg.norm(np.diff(seg.coefs, axis=0), axis=1)
    return BreakDiagnostics(
        i_min=i_min, j_min=float(jumps.min()), j_max=float(jumps.max())
    )
