"""Penalty-grid construction and information-criterion model selection.

The break penalty is tuned by solving the segmentation problem along a
decreasing grid of penalty values and picking the fit minimizing

    IC(lam_j) = log(sse_j / T) + p * (m_j + 1) / sqrt(T),

where ``m_j`` is the break count of the fit at ``lam_j``. Classical
fixed-count criteria (BIC and a Liu-Wu-Zidek style modified criterion)
are provided as baselines; they reduce to exact fixed-m solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import SegmentCostEngine
from .dp import objective_of_breaks, solve_fixed_m, solve_l0
from .model import SolverResult
from .validation import check_min_gap, max_feasible_breaks

__all__ = [
    "LambdaPath",
    "build_grid",
    "fit_path",
    "select_by_ic",
    "select_by_classical_ic",
]

_LAMBDA_FLOOR = 1e-8
_GRID_DECADES = 1e3
_SSE_GUARD = 1e-300


@dataclass(frozen=True, eq=False)
class LambdaPath:
    """Per-penalty solutions along a decreasing grid, with their IC values."""

    lambdas: np.ndarray
    results: tuple[SolverResult, ...]
    sses: np.ndarray
    ics: np.ndarray
    n_obs: int
    n_features: int

    def __post_init__(self) -> None:
        if len(self.results) == 0:
            raise ValueError("empty path")
        if np.any(np.diff(self.lambdas) > 0):
            raise ValueError("lambda grid must be non-increasing")

    @property
    def n_breaks(self) -> np.ndarray:
        return np.array([r.n_breaks for r in self.results])

    def rows(self) -> list[dict]:
        """Serializable per-penalty report rows."""
        return [
            {
                "lambda": float(lam),
                "n_breaks": int(res.n_breaks),
                "breaks": [int(b) for b in res.segmentation.breaks],
                "sse": float(sse),
                "ic": float(ic),
            }
            for lam, res, sse, ic in zip(self.lambdas, self.results, self.sses, self.ics)
        ]


def build_grid(engine: SegmentCostEngine, n_lambdas: int, min_gap: int = 2) -> np.ndarray:
    """Decreasing geometric penalty grid spanning three decades.

    The top of the grid is the full-sample sse: at that penalty no break
    set can pay for itself (each break costs more than all removable
    sse), so the no-break fit is guaranteed to sit on the path and the
    criterion always gets to compare against it. A single-split ceiling
    (total sse minus the best one-split sse) is not safe here, because
    multi-break solutions can stay profitable above it. Degenerate series
    with zero total sse collapse to a single tiny penalty.
    """
    if n_lambdas < 1:
        raise ValueError(f"n_lambdas must be >= 1, got {n_lambdas}")
    check_min_gap(min_gap)
    full = engine.total_sse()
    if full <= 0.0:
        return np.array([_LAMBDA_FLOOR])
    lam_max = max(full, _LAMBDA_FLOOR)
    if n_lambdas == 1:
        return np.array([lam_max])
    return np.geomspace(lam_max, lam_max / _GRID_DECADES, n_lambdas)


def fit_path(
    engine: SegmentCostEngine,
    lambdas,
    min_gap: int = 2,
    solver=solve_l0,
) -> LambdaPath:
    """Solve the segmentation problem at every grid value.

    ``solver`` is any callable with the ``solve_l0`` signature; per-value
    solves are independent of one another, so they may be distributed if
    the caller wants to.
    """
    lambdas = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1].copy()
    results = tuple(solver(engine, float(lam), min_gap) for lam in lambdas)
    T, p = engine.n_obs, engine.n_features
    sses = np.array(
        [objective_of_breaks(engine, r.segmentation.breaks, 0.0) for r in results]
    )
    ms = np.array([r.n_breaks for r in results])
    ics = np.log((sses + _SSE_GUARD) / T) + p * (ms + 1) / np.sqrt(T)
    return LambdaPath(
        lambdas=lambdas, results=results, sses=sses, ics=ics, n_obs=T, n_features=p
    )


def select_by_ic(path: LambdaPath) -> SolverResult:
    """Fit minimizing the information criterion, ties toward larger penalty.

    The grid is stored in decreasing order, so the first minimizer is the
    largest penalty (fewest breaks) among ties. Duplicated grid values
    cannot change the selection.
    """
    return path.results[int(np.argmin(path.ics))]


def classical_ic_table(
    engine: SegmentCostEngine,
    m_max: int,
    min_gap: int = 2,
    lwz_c0: float = 0.299,
    lwz_power: float = 2.1,
) -> dict:
    """Fixed-m sse values with BIC and LWZ scores for m = 0..m_max."""
    min_gap = check_min_gap(min_gap)
    T, p = engine.n_obs, engine.n_features
    m_max = int(m_max)
    if m_max < 0 or m_max > max_feasible_breaks(T, min_gap):
        raise ValueError(
            f"m_max={m_max} infeasible for T={T} with min_gap={min_gap}"
        )
    results, bic, lwz, sses = [], [], [], []
    for m in range(m_max + 1):
        res = solve_fixed_m(engine, m, min_gap)
        sse = res.objective
        n_par = p * (m + 1) + m
        dof = T - p * (m + 1)
        bic.append(np.log((sse + _SSE_GUARD) / T) + n_par * np.log(T) / T)
        lwz.append(
            np.log((sse + _SSE_GUARD) / dof) + n_par * lwz_c0 * np.log(T) ** lwz_power / T
            if dof > 0
            else np.inf
        )
        results.append(res)
        sses.append(sse)
    return {
        "results": results,
        "sse": np.array(sses),
        "bic": np.array(bic),
        "lwz": np.array(lwz),
    }


def select_by_classical_ic(
    engine: SegmentCostEngine,
    criterion: str,
    m_max: int,
    min_gap: int = 2,
    lwz_c0: float = 0.299,
    lwz_power: float = 2.1,
) -> SolverResult:
    """Break count by BIC or LWZ over exact fixed-m fits.

    BIC(m) = log(sse_m / T) + (p(m+1) + m) log(T) / T and
    LWZ(m) = log(sse_m / (T - p(m+1))) + (p(m+1) + m) c0 (log T)^a / T
    with the conventional c0 = 0.299, a = 2.1 (both overridable). Ties go
    to the smaller break count.
    """
    criterion = criterion.lower()
    if criterion not in ("bic", "lwz"):
        raise ValueError(f"criterion must be 'bic' or 'lwz', got {criterion!r}")
    table = classical_ic_table(engine, m_max, min_gap, lwz_c0, lwz_power)
    scores = table[criterion]
    return table["results"][int(np.argmin(scores))]
