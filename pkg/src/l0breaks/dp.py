"""Exact segmentation solvers based on optimal-partitioning recursions.

``solve_l0`` minimizes  sse(segmentation) + lam * n_breaks  globally over
all segmentations whose regimes are at least ``min_gap`` long, via the
Bellman recursion over last-regime starts

    F(t) = min_{s} F(s) + cost(s, t) + lam * 1{s > 0},

with admissible ``s`` either 0 or in ``[min_gap, t - min_gap]``.
``solve_fixed_m`` minimizes the pure sum of squares subject to an exact
break count, and ``brute_force`` enumerates every admissible break set
as an independent test oracle for both.

Ties are broken deterministically: fewer breaks first, then the
lexicographically earliest break positions. All three solvers share this
rule and the same cost/accumulation arithmetic, so agreement checks can
demand exact equality rather than tolerances.
"""

from __future__ import annotations

import time

import numpy as np

from .costs import SegmentCostEngine
from .model import Certificate, InfeasibleProblem, Segmentation, SolverResult
from .validation import check_min_gap, max_feasible_breaks

__all__ = ["solve_l0", "solve_fixed_m", "brute_force"]


def _chain_breaks(parent: np.ndarray, t: int) -> tuple[int, ...]:
    """Break positions of the partial solution for [0, t), via backpointers."""
    out = []
    s = int(parent[t])
    while s > 0:
        out.append(s)
        s = int(parent[s])
    return tuple(reversed(out))


def build_segmentation(engine: SegmentCostEngine, breaks) -> Segmentation:
    """Segmentation with per-regime least-squares coefficients."""
    bounds = (0, *breaks, engine.n_obs)
    coefs = np.vstack(
        [engine.cost(bounds[j], bounds[j + 1]).coef for j in range(len(bounds) - 1)]
    )
    return Segmentation(breaks=tuple(breaks), coefs=coefs, n_obs=engine.n_obs)


def fold_objective(sses, lam: float) -> float:
    """Left-to-right accumulation of segment costs plus per-break penalty.

    Every solver reports objectives through this fold (or an elementwise
    equivalent), so identical break sets always yield identical floats.
    """
    obj = 0.0
    for j, sse in enumerate(sses):
        obj = obj + float(sse) + (lam if j > 0 else 0.0)
    return obj


def objective_of_breaks(engine: SegmentCostEngine, breaks, lam: float) -> float:
    bounds = np.array((0, *breaks, engine.n_obs), dtype=np.intp)
    sses = engine.sse_many(bounds[:-1], bounds[1:])
    return fold_objective(sses, lam)


def solve_l0(engine: SegmentCostEngine, lam: float, min_gap: int = 2) -> SolverResult:
    """Global minimizer of  sse + lam * n_breaks  with a regime-length floor.

    Parameters
    ----------
    engine : SegmentCostEngine
    lam : float
        Nonnegative penalty per break. ``lam = 0`` is admitted and
        degenerates to the maximal fit allowed by ``min_gap``.
    min_gap : int
        Minimum regime length, at least 2.

    Returns
    -------
    SolverResult
        Certified optimal; ``stats`` records dp cell count and wall time.
    """
    t0 = time.perf_counter()
    min_gap = check_min_gap(min_gap)
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    T = engine.n_obs
    if T < min_gap:
        raise InfeasibleProblem(f"T={T} shorter than min_gap={min_gap}")

    F = np.full(T + 1, np.inf)
    F[0] = 0.0
    parent = np.full(T + 1, -1, dtype=np.intp)
    n_breaks = np.zeros(T + 1, dtype=np.intp)
    cells = 0

    for t in range(min_gap, T + 1):
        if t >= 2 * min_gap:
            starts = np.concatenate(
                ([0], np.arange(min_gap, t - min_gap + 1, dtype=np.intp))
            )
        else:
            starts = np.zeros(1, dtype=np.intp)
        sses = engine.sse_many(starts, t)
        cand = F[starts] + sses + np.where(starts > 0, lam, 0.0)
        cells += starts.shape[0]

        best = cand.min()
        tied = np.flatnonzero(cand == best)
        if tied.shape[0] == 1:
            s_star = int(starts[tied[0]])
        else:
            s_star = min(
                (int(starts[i]) for i in tied),
                key=lambda s: (
                    n_breaks[s] + (1 if s > 0 else 0),
                    _chain_breaks(parent, s) + ((s,) if s > 0 else ()),
                ),
            )
        F[t] = best
        parent[t] = s_star
        n_breaks[t] = n_breaks[s_star] + (1 if s_star > 0 else 0)

    breaks = _chain_breaks(parent, T)
    return SolverResult(
        objective=float(F[T]),
        segmentation=build_segmentation(engine, breaks),
        certificate=Certificate.PROVED_OPTIMAL,
        gap=0.0,
        stats={"dp_cells": cells, "wall_time": time.perf_counter() - t0},
    )


def solve_fixed_m(engine: SegmentCostEngine, m: int, min_gap: int = 2) -> SolverResult:
    """Minimum sum of squares over segmentations with exactly ``m`` breaks.

    The reported objective is the pure sse (no penalty term). Used by the
    classical information criteria and by post-detection inference, which
    re-estimates the model at a fixed break count.
    """
    t0 = time.perf_counter()
    min_gap = check_min_gap(min_gap)
    m = int(m)
    T = engine.n_obs
    if m < 0 or (m + 1) * min_gap > T:
        raise InfeasibleProblem(
            f"{m} breaks need at least {(m + 1) * min_gap} observations "
            f"with min_gap={min_gap}, have {T}"
        )

    # F[k, t]: best sse splitting [0, t) into k+1 regimes of length >= min_gap.
    F = np.full((m + 1, T + 1), np.inf)
    parent = np.full((m + 1, T + 1), -1, dtype=np.intp)
    cells = 0

    ts = np.arange(min_gap, T + 1, dtype=np.intp)
    F[0, ts] = engine.sse_many(np.zeros_like(ts), ts)
    parent[0, ts] = 0
    cells += ts.shape[0]

    def chain(k: int, t: int) -> tuple[int, ...]:
        out = []
        kk = k
        s = int(parent[kk, t])
        while s > 0:
            out.append(s)
            kk -= 1
            s = int(parent[kk, s])
        return tuple(reversed(out))

    for k in range(1, m + 1):
        for t in range((k + 1) * min_gap, T + 1):
            starts = np.arange(k * min_gap, t - min_gap + 1, dtype=np.intp)
            cand = F[k - 1, starts] + engine.sse_many(starts, t)
            cells += starts.shape[0]
            best = cand.min()
            tied = np.flatnonzero(cand == best)
            if tied.shape[0] == 1:
                s_star = int(starts[tied[0]])
            else:
                s_star = min(
                    (int(starts[i]) for i in tied),
                    key=lambda s: chain(k - 1, s) + (s,),
                )
            F[k, t] = best
            parent[k, t] = s_star

    breaks = chain(m, T)
    return SolverResult(
        objective=float(F[m, T]),
        segmentation=build_segmentation(engine, breaks),
        certificate=Certificate.PROVED_OPTIMAL,
        gap=0.0,
        stats={"dp_cells": cells, "wall_time": time.perf_counter() - t0},
    )


def brute_force(
    engine: SegmentCostEngine, lam: float, min_gap: int = 2, max_T: int = 16
) -> SolverResult:
    """Exhaustive oracle: evaluate every admissible break set.

    Enumerates all break subsets respecting ``min_gap`` (there are at most
    2^(T-1)), scores each with the shared objective fold, and keeps the
    lexicographic minimum of (objective, n_breaks, positions). Refuses
    samples longer than ``max_T``.
    """
    min_gap = check_min_gap(min_gap)
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    T = engine.n_obs
    if T > max_T:
        raise ValueError(f"T={T} exceeds brute-force limit max_T={max_T}")
    if T < min_gap:
        raise InfeasibleProblem(f"T={T} shorter than min_gap={min_gap}")

    # Table of every window cost, then pure-python enumeration over it.
    cost = np.zeros((T + 1, T + 1))
    for e in range(1, T + 1):
        starts = np.arange(e, dtype=np.intp)
        cost[:e, e] = engine.sse_many(starts, e)

    best_key: tuple | None = None
    n_evaluated = 0

    def visit(breaks: list[int]) -> None:
        nonlocal best_key, n_evaluated
        n_evaluated += 1
        bounds = [0, *breaks, T]
        obj = fold_objective(
            [cost[bounds[j], bounds[j + 1]] for j in range(len(bounds) - 1)], lam
        )
        key = (obj, len(breaks), tuple(breaks))
        if best_key is None or key < best_key:
            best_key = key

    def extend(breaks: list[int], last: int) -> None:
        visit(breaks)
        first = min_gap if last == 0 else last + min_gap
        for b in range(first, T - min_gap + 1):
            breaks.append(b)
            extend(breaks, b)
            breaks.pop()

    extend([], 0)
    assert best_key is not None
    obj, _, breaks = best_key
    return SolverResult(
        objective=obj,
        segmentation=build_segmentation(engine, breaks),
        certificate=Certificate.PROVED_OPTIMAL,
        gap=0.0,
        stats={"patterns_evaluated": n_evaluated},
    )
