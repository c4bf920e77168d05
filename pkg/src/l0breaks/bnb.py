"""Branch-and-bound solver for the binary-coupled quadratic formulation.

The penalized segmentation problem can be written with one binary
indicator per interior time point (1 iff a break starts there), big-M
rows coupling the indicator to coefficient movement, and window
constraints ruling out breaks closer than ``min_gap``. This module
solves that program directly by best-first branch and bound over the
indicators in time order, and certifies optimality, so its results can
cross-check the dynamic-programming solver (and vice versa).

Node relaxation: a node fixes the break pattern up to some position.
Its fully decided regimes are priced exactly through the shared cost
engine, committed breaks pay their penalty, and the undecided suffix is
bounded below by a block-tiling bound (see ``_suffix_bounds``), which is
admissible because a window cost never exceeds the summed costs of any
partition of that window, and each additional break either pays the
penalty or spoils at most one block.

Big-M never enters the node arithmetic (regimes are priced at the
unconstrained least-squares optimum, i.e. M = infinity); instead every
returned solution is audited post hoc: if any realized coefficient jump
comes within 1% of M, a :class:`BigMTooSmall` error is raised because
the bound would bind in the explicit binary program.
"""

from __future__ import annotations

import heapq
import io
import time

import numpy as np

from .costs import SegmentCostEngine
from .dp import build_segmentation, objective_of_breaks, solve_fixed_m, solve_l0
from .model import (
    BigMTooSmall,
    Certificate,
    Dataset,
    InfeasibleProblem,
    PenaltyConfig,
    SolverResult,
)

__all__ = ["solve_miqp", "choose_big_m", "export_lp"]

_GAP_TOL = 1e-7
_DEFAULT_NODE_BUDGET = 5_000_000


def _suffix_bounds(engine: SegmentCostEngine, lam: float, min_gap: int) -> np.ndarray:
    """H[s]: admissible lower bound on the value of any segmentation of [s, T).

    Tile [s, T) with disjoint blocks of length L >= max(min_gap, p + 1).
    Any completion either leaves a block inside a single regime (paying at
    least the block's own cost, by cost superadditivity) or places a break
    strictly inside it (paying lam, and one break spoils at most one
    block). Hence sum over blocks of min(block cost, lam) never exceeds
    the completion's sse plus penalty.
    """
    T = engine.n_obs
    L = max(min_gap, engine.n_features + 1)
    H = np.zeros(T + 1)
    if T - L < 0:
        return H
    starts = np.arange(0, T - L + 1, dtype=np.intp)
    atom = np.minimum(engine.sse_many(starts, starts + L), lam)
    for s in range(T - L, -1, -1):
        H[s] = atom[s] + H[s + L]
    return H


def solve_miqp(
    engine: SegmentCostEngine,
    cfg: PenaltyConfig,
    warm_start: bool = True,
    node_budget: int = _DEFAULT_NODE_BUDGET,
) -> SolverResult:
    """Certified minimization of the penalized objective by branch and bound.

    Parameters
    ----------
    engine : SegmentCostEngine
    cfg : PenaltyConfig
        Penalty ``lam``, big-M audit level, regime-length floor, and
        optionally an exact break count ``fixed_m``.
    warm_start : bool
        Seed the incumbent from the partitioning solver. With ``False``
        the search starts from scratch, which makes cross-certification
        against that solver meaningful.
    node_budget : int
        Maximum nodes to explore; on exhaustion the best incumbent is
        returned with :attr:`Certificate.INCUMBENT_ONLY` and the residual
        gap.

    Raises
    ------
    BigMTooSmall
        If the optimal solution's largest coefficient jump exceeds
        ``0.99 * cfg.big_m``.
    InfeasibleProblem
        If ``fixed_m`` breaks do not fit, or T < min_gap.
    """
    t0 = time.perf_counter()
    T = engine.n_obs
    lam, min_gap, fixed_m = cfg.lam, cfg.min_gap, cfg.fixed_m
    cfg.validate_for(T)
    if T < min_gap:
        raise InfeasibleProblem(f"T={T} shorter than min_gap={min_gap}")

    H = _suffix_bounds(engine, lam, min_gap)

    inc_breaks: tuple[int, ...] | None = None
    inc_obj = np.inf
    if warm_start:
        seed = (
            solve_l0(engine, lam, min_gap)
            if fixed_m is None
            else solve_fixed_m(engine, fixed_m, min_gap)
        )
        inc_breaks = seed.segmentation.breaks
        inc_obj = objective_of_breaks(engine, inc_breaks, lam)
    elif fixed_m is None or fixed_m == 0:
        inc_breaks = ()
        inc_obj = objective_of_breaks(engine, (), lam)

    def better(obj: float, breaks: tuple[int, ...]) -> bool:
        if obj < inc_obj:
            return True
        if obj == inc_obj and inc_breaks is not None:
            return (len(breaks), breaks) < (len(inc_breaks), inc_breaks)
        return False

    # Node tuple: (bound, push order, partial value g, open-regime start,
    # committed breaks). g prices all closed regimes plus lam per break.
    # Two prefixes with the same open-regime start (and committed count,
    # when the count is fixed) admit identical completions, so only the
    # one with the better (g, then lexicographic break) key can win;
    # `best_prefix` prunes the dominated ones.
    order = 0
    root = (float(max(H[0], lam * fixed_m if fixed_m else 0.0)), order, 0.0, 0, ())
    heap = [root]
    best_prefix: dict = {(0, 0): (0.0, 0, ())}
    nodes = 0
    budget_hit = False
    lower_bound = root[0]

    def state_of(s: int, k: int):
        return (s, k) if fixed_m is not None else (s, 0)

    while heap:
        if nodes >= node_budget:
            budget_hit = True
            lower_bound = heap[0][0]
            break
        bound, _, g, s, breaks = heapq.heappop(heap)
        lower_bound = bound
        if bound >= inc_obj - _GAP_TOL:
            break
        k = len(breaks)
        if best_prefix.get(state_of(s, k)) != (g, k, breaks):
            continue  # superseded by a dominating prefix pushed later
        nodes += 1

        candidates = np.arange(max(s + min_gap, min_gap), T - min_gap + 1, dtype=np.intp)
        if fixed_m is not None:
            remaining = fixed_m - k
            if remaining == 0:
                candidates = candidates[:0]
            else:
                # Leave room for the breaks still owed after each candidate.
                candidates = candidates[candidates + remaining * min_gap <= T]
        ends = np.concatenate((candidates, [T]))
        sses = engine.sse_many(np.full(ends.shape, s, dtype=np.intp), ends)

        # Terminal completion: no further breaks after s.
        if fixed_m is None or k == fixed_m:
            total = g + float(sses[-1])
            if better(total, breaks):
                inc_obj, inc_breaks = total, breaks

        for b, sse in zip(candidates, sses[:-1]):
            child_g = g + float(sse) + lam
            child_bound = child_g + H[b]
            if fixed_m is not None:
                child_bound = max(child_bound, child_g + lam * (fixed_m - k - 1))
            if child_bound >= inc_obj - _GAP_TOL:
                continue
            entry = (child_g, k + 1, breaks + (int(b),))
            state = state_of(int(b), k + 1)
            held = best_prefix.get(state)
            if held is not None and held <= entry:
                continue
            best_prefix[state] = entry
            order += 1
            heapq.heappush(heap, (float(child_bound), order, entry[0], int(b), entry[2]))
    else:
        lower_bound = inc_obj

    if inc_breaks is None:
        raise InfeasibleProblem("no feasible break pattern found")

    gap = max(0.0, inc_obj - lower_bound)
    certificate = Certificate.INCUMBENT_ONLY if budget_hit else Certificate.PROVED_OPTIMAL
    segmentation = build_segmentation(engine, inc_breaks)

    if segmentation.n_breaks:
        jump = float(np.abs(np.diff(segmentation.coefs, axis=0)).max())
        if jump > 0.99 * cfg.big_m:
            raise BigMTooSmall(
                f"largest coefficient jump {jump:.6g} exceeds 0.99 * M = "
                f"{0.99 * cfg.big_m:.6g}; increase big_m (see choose_big_m)"
            )

    return SolverResult(
        objective=objective_of_breaks(engine, inc_breaks, lam),
        segmentation=segmentation,
        certificate=certificate,
        gap=gap if certificate is Certificate.INCUMBENT_ONLY else min(gap, _GAP_TOL),
        stats={"nodes_explored": nodes, "wall_time": time.perf_counter() - t0},
    )


def choose_big_m(data: Dataset, safety: float = 10.0) -> float:
    """Heuristic big-M level from a coarse sweep of window regressions.

    Fits ordinary least squares on sliding windows, takes the largest
    coefficient infinity-norm seen, floors it at 1.0 and scales by
    ``safety``. Two window lengths are swept: the shortest regime a
    solver can produce (which is where interpolation-like fits with
    extreme coefficients live) and a coarse T/8 window for the overall
    scale. The level is a convention, not a guarantee, which is why
    :func:`solve_miqp` audits every result against it post hoc.
    """
    T, p = data.n_obs, data.n_features
    widths = {max(p, 2), max(p + 1, -(-T // 8))}
    largest = 0.0
    for w in widths:
        w = min(w, T)
        step = max(1, w // 2)
        for s in range(0, T - w + 1, step):
            coef = np.linalg.lstsq(data.X[s : s + w], data.y[s : s + w], rcond=None)[0]
            largest = max(largest, float(np.abs(coef).max()))
    return float(safety) * max(largest, 1.0)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_lp(data: Dataset, cfg: PenaltyConfig) -> str:
    """Render the instance as CPLEX-style LP text for external solvers.

    Grammar (one construct per line, 1-based time indices):

    * objective: ``- 2 <x_tj * y_t> b_t_j`` linear terms, ``<lam> z_t``
      penalty terms, a quadratic bracket ``[ ... ] / 2`` holding
      ``2 <x_tj^2> b_t_j ^ 2`` and ``2 <2 x_tj x_tl> b_t_j * b_t_l``
      terms (same-t pairs only), and the constant ``sum y_t^2``;
    * rows ``mup_t_j`` / ``mlo_t_j``: big-M coupling
      ``b_{t+1}_j - b_t_j -/+ M z_t <= / >= 0``;
    * rows ``gap_t``: ``z_t + ... + z_{t+min_gap-1} <= 1``;
    * row ``count``: ``z_1 + ... = fixed_m`` when an exact break count is
      requested;
    * ``Bounds`` declares every ``b_t_j`` free; ``Binaries`` lists the
      ``z_t``.
    """
    T, p = data.n_obs, data.n_features
    X, y = data.X, data.y
    out = io.StringIO()
    out.write("\\ l0-penalized segmented least squares, binary break indicators\n")
    out.write(f"\\ T={T} p={p} lambda={_fmt(cfg.lam)} M={_fmt(cfg.big_m)}"
              f" min_gap={cfg.min_gap}\n")
    out.write("Minimize\n obj:")

    terms: list[str] = []
    for t in range(T):
        for j in range(p):
            c = -2.0 * X[t, j] * y[t]
            if c != 0.0:
                terms.append(f"{'-' if c < 0 else '+'} {_fmt(abs(c))} b_{t + 1}_{j + 1}")
    for t in range(1, T):
        terms.append(f"+ {_fmt(cfg.lam)} z_{t}")
    for chunk in terms:
        out.write(f" {chunk}")

    out.write(" + [")
    for t in range(T):
        for j in range(p):
            for l in range(j, p):
                q = X[t, j] * X[t, l]
                if q == 0.0:
                    continue
                c = 2.0 * q if j == l else 4.0 * q
                sign = "-" if c < 0 else "+"
                if j == l:
                    out.write(f" {sign} {_fmt(abs(c))} b_{t + 1}_{j + 1} ^ 2")
                else:
                    out.write(
                        f" {sign} {_fmt(abs(c))} b_{t + 1}_{j + 1} * b_{t + 1}_{l + 1}"
                    )
    out.write(" ] / 2")
    out.write(f" + {_fmt(float(y @ y))}\n")

    out.write("Subject To\n")
    M = cfg.big_m
    for t in range(1, T):
        for j in range(1, p + 1):
            out.write(
                f" mup_{t}_{j}: b_{t + 1}_{j} - b_{t}_{j} - {_fmt(M)} z_{t} <= 0\n"
            )
            out.write(
                f" mlo_{t}_{j}: b_{t + 1}_{j} - b_{t}_{j} + {_fmt(M)} z_{t} >= 0\n"
            )
    for t in range(1, T - cfg.min_gap + 1):
        zs = " + ".join(f"z_{t + i}" for i in range(cfg.min_gap))
        out.write(f" gap_{t}: {zs} <= 1\n")
    if cfg.fixed_m is not None:
        zs = " + ".join(f"z_{t}" for t in range(1, T))
        out.write(f" count: {zs} = {cfg.fixed_m}\n")

    out.write("Bounds\n")
    for t in range(1, T + 1):
        for j in range(1, p + 1):
            out.write(f" b_{t}_{j} free\n")
    out.write("Binaries\n")
    out.write(" " + " ".join(f"z_{t}" for t in range(1, T)) + "\n")
    out.write("End\n")
    return out.getvalue()
