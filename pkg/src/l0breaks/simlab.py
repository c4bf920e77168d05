"""Seeded data-generating processes and replication benchmarks.

Three benchmark families, each observed as y_t = beta_t' x_t + u_t:

no_break_1..6 (beta constant, m* = 0)
    1. x iid N(0,1), u iid N(0, sigma_u^2)
    2. x AR(1) rho=0.5 innovations N(0, 0.75), u iid N(0, sigma_u^2)
    3. x iid N(0,1), u = sigma_u v with v AR(1) rho=0.5, N(0,1) innovations
    4. x AR(1) as above, u = sigma_u sqrt(h_t) eps_t with
       h_t = 0.05 + 0.05 u_{t-1}^2 + 0.9 h_{t-1}
    5. x AR(1), u iid with sd sigma1 in the first half, sigma2 after
    6. y_t = a y_{t-1} + eps_t, eps iid N(0, 1 - a^2), x_t = y_{t-1}

one_break_1..6 (single coefficient jump at mid-sample, m* = 1)
    1. beta 0 -> 1, x iid N(0,1), u iid N(0, sigma_u^2)
    2. same beta, x iid N(0,1), u = sigma_u v, v AR(1) rho=0.5,
       innovations N(0, 0.75)
    3. same beta, x AR(1), u iid N(0, sigma_u^2)
    4. same beta, x AR(1), u the GARCH recursion of family 4
    5. same beta, x AR(1), u = sigma_u v, v MA(1) theta=0.5,
       innovations N(0, 0.8)
    6. beta 0.2 -> 0.8 with x_t = y_{t-1}, u iid N(0, sigma_u^2)

many_breaks_1 / many_breaks_2 (alternating 0/1 coefficient, m* = R - 1)
    R equal regimes of length delta, T = R * delta; x iid N(0,1),
    u iid N(0, sigma_u^2). Family 1 varies R at fixed delta, family 2
    varies delta (via T) at fixed R; the generator is shared.

Recursions start from their stationary mean (0; GARCH variance state at
its fixed point 1.0) and a 100-observation burn-in is discarded. All
draws come from one ``numpy`` generator seeded per replication, so every
sample is a pure function of its spec.

Benchmark metrics: ``pce`` is the percentage of replications whose
estimated break count matches the truth, and ``hd_scaled`` the mean
Hausdorff distance between estimated and true break sets, times 100 / T,
over the correct-count replications only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

import numpy as np

from .bnb import choose_big_m, solve_miqp
from .costs import SegmentCostEngine
from .model import Dataset, PenaltyConfig, Segmentation
from .tuning import build_grid, fit_path, select_by_ic, select_by_classical_ic
from .validation import max_feasible_breaks

__all__ = [
    "BURN_IN",
    "DgpSpec",
    "CellResult",
    "generate",
    "hausdorff",
    "run_cell",
    "run_table",
    "write_csv",
    "METHODS",
]

BURN_IN = 100

_FAMILIES = tuple(
    [f"no_break_{i}" for i in range(1, 7)]
    + [f"one_break_{i}" for i in range(1, 7)]
    + ["many_breaks_1", "many_breaks_2"]
)

METHODS = ("mio_dp", "mio_bnb", "bic", "lwz")


@dataclass(frozen=True)
class DgpSpec:
    """One simulation design point.

    Canonical parameter values are sigma_u in {0.5, 1, 1.5} (many-breaks
    designs use {0.2, 0.5}), sigma1 = 0.1, sigma2 in {0.2, 0.3, 0.5} and
    ar_coef in {0.2, 0.5, 0.9}; other positive values are accepted.
    """

    family: str
    n_obs: int
    sigma_u: float = 1.0
    sigma1: float = 0.1
    sigma2: float = 0.3
    ar_coef: float = 0.5
    n_regimes: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n_obs < 4:
            raise ValueError(f"n_obs too small: {self.n_obs}")
        for name in ("sigma_u", "sigma1", "sigma2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.ar_coef < 1:
            raise ValueError(f"ar_coef must lie in (0, 1), got {self.ar_coef}")
        if self.family.startswith("many_breaks"):
            if self.n_regimes < 2 or self.n_obs % self.n_regimes != 0:
                raise ValueError(
                    f"inconsistent many-break geometry: T={self.n_obs} is not a "
                    f"multiple of R={self.n_regimes}"
                )


def _ar1(rng: np.random.Generator, n: int, rho: float, innov_sd: float) -> np.ndarray:
    innov = rng.normal(0.0, innov_sd, n)
    out = np.empty(n)
    prev = 0.0
    for t in range(n):
        prev = rho * prev + innov[t]
        out[t] = prev
    return out


def _ma1(rng: np.random.Generator, n: int, theta: float, innov_sd: float) -> np.ndarray:
    innov = rng.normal(0.0, innov_sd, n + 1)
    return innov[1:] + theta * innov[:-1]


def _garch(rng: np.random.Generator, n: int, sigma_u: float) -> np.ndarray:
    eps = rng.standard_normal(n)
    out = np.empty(n)
    h_prev, u_prev = 1.0, 0.0
    for t in range(n):
        h = 0.05 + 0.05 * u_prev * u_prev + 0.9 * h_prev
        u_prev = sigma_u * np.sqrt(h) * eps[t]
        h_prev = h
        out[t] = u_prev
    return out


def _lagged_response(
    rng: np.random.Generator, n_obs: int, coefs: tuple[float, float], sigma_u: float
) -> tuple[np.ndarray, np.ndarray]:
    """Recursive y_t = beta_t y_{t-1} + u_t; returns (x = lagged y, y)."""
    n = n_obs + BURN_IN
    half = BURN_IN + n_obs // 2
    u = rng.normal(0.0, sigma_u, n)
    y = np.empty(n)
    x = np.empty(n)
    prev = 0.0
    for t in range(n):
        x[t] = prev
        prev = (coefs[0] if t < half else coefs[1]) * prev + u[t]
        y[t] = prev
    return x[BURN_IN:], y[BURN_IN:]


def generate(spec: DgpSpec) -> tuple[Dataset, Segmentation]:
    """Draw one sample; bit-reproducible given the spec (seed included)."""
    rng = np.random.default_rng(spec.seed)
    T = spec.n_obs
    n = T + BURN_IN
    family, idx = spec.family.rsplit("_", 1)

    if spec.family.startswith("many_breaks"):
        delta = T // spec.n_regimes
        x = rng.standard_normal(T)
        u = rng.normal(0.0, spec.sigma_u, T)
        coef = np.array([[float(i % 2)] for i in range(spec.n_regimes)])
        breaks = tuple(delta * i for i in range(1, spec.n_regimes))
        true = Segmentation(breaks=breaks, coefs=coef, n_obs=T)
        beta = np.repeat(coef[:, 0], delta)
        return Dataset(y=beta * x + u, X=x[:, None]), true

    variant = int(idx)
    if family == "no_break":
        if variant == 1:
            x = rng.standard_normal(n)[BURN_IN:]
            u = rng.normal(0.0, spec.sigma_u, T)
        elif variant == 2:
            x = _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
            u = rng.normal(0.0, spec.sigma_u, T)
        elif variant == 3:
            x = rng.standard_normal(n)[BURN_IN:]
            u = spec.sigma_u * _ar1(rng, n, 0.5, 1.0)[BURN_IN:]
        elif variant == 4:
            x = _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
            u = _garch(rng, n, spec.sigma_u)[BURN_IN:]
        elif variant == 5:
            x = _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
            half = T // 2
            u = np.concatenate(
                (rng.normal(0.0, spec.sigma1, half), rng.normal(0.0, spec.sigma2, T - half))
            )
        elif variant == 6:
            a = spec.ar_coef
            eps = rng.normal(0.0, np.sqrt(1.0 - a * a), n)
            y_full = np.empty(n)
            prev = 0.0
            for t in range(n):
                prev = a * prev + eps[t]
                y_full[t] = prev
            x = np.empty(T)
            x[0] = y_full[BURN_IN - 1]
            x[1:] = y_full[BURN_IN:-1]
            true = Segmentation(breaks=(), coefs=np.array([[a]]), n_obs=T)
            return Dataset(y=y_full[BURN_IN:], X=x[:, None]), true
        else:
            raise ValueError(f"unknown family {spec.family!r}")
        true = Segmentation(breaks=(), coefs=np.array([[1.0]]), n_obs=T)
        return Dataset(y=x + u, X=x[:, None]), true

    # one_break families: coefficient jumps at mid-sample.
    half = T // 2
    if variant == 6:
        x, y = _lagged_response(rng, T, (0.2, 0.8), spec.sigma_u)
        true = Segmentation(breaks=(half,), coefs=np.array([[0.2], [0.8]]), n_obs=T)
        return Dataset(y=y, X=x[:, None]), true
    if variant == 1:
        x = rng.standard_normal(n)[BURN_IN:]
        u = rng.normal(0.0, spec.sigma_u, T)
    elif variant == 2:
        x = rng.standard_normal(n)[BURN_IN:]
        u = spec.sigma_u * _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
    elif variant == 3:
        x = _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
        u = rng.normal(0.0, spec.sigma_u, T)
    elif variant == 4:
        x = _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
        u = _garch(rng, n, spec.sigma_u)[BURN_IN:]
    elif variant == 5:
        x = _ar1(rng, n, 0.5, np.sqrt(0.75))[BURN_IN:]
        u = spec.sigma_u * _ma1(rng, n, 0.5, np.sqrt(0.8))[BURN_IN:]
    else:
        raise ValueError(f"unknown family {spec.family!r}")
    beta = np.zeros(T)
    beta[half:] = 1.0
    true = Segmentation(breaks=(half,), coefs=np.array([[0.0], [1.0]]), n_obs=T)
    return Dataset(y=beta * x + u, X=x[:, None]), true


def hausdorff(a, b, n_obs: int) -> float | None:
    """Scaled Hausdorff distance between break sets, times 100 / T.

    Two empty sets are at distance 0; exactly one empty set has no
    meaningful distance and yields ``None`` (excluded from aggregation).
    """
    a = np.asarray(sorted(a), dtype=np.float64)
    b = np.asarray(sorted(b), dtype=np.float64)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return None
    d = np.abs(a[:, None] - b[None, :])
    directed = max(d.min(axis=1).max(), d.min(axis=0).max())
    return float(directed * 100.0 / n_obs)


@dataclass(frozen=True)
class CellResult:
    """Aggregate of one (design, parameter, T, method) benchmark cell."""

    dgp: str
    param: str
    n_obs: int
    method: str
    pce: float
    hd_scaled: float | None
    n_reps: int
    seed: int
    n_failed: int = 0


def _estimate(method: str, engine: SegmentCostEngine, data: Dataset,
              n_lambdas: int, min_gap: int, m_max: int):
    if method == "mio_dp":
        grid = build_grid(engine, n_lambdas, min_gap)
        return select_by_ic(fit_path(engine, grid, min_gap))
    if method == "mio_bnb":
        big_m = choose_big_m(data)
        def bnb(engine, lam, min_gap):
            return solve_miqp(engine, PenaltyConfig(lam=lam, big_m=big_m, min_gap=min_gap))
        grid = build_grid(engine, n_lambdas, min_gap)
        return select_by_ic(fit_path(engine, grid, min_gap, solver=bnb))
    if method in ("bic", "lwz"):
        feasible = min(m_max, max_feasible_breaks(engine.n_obs, min_gap))
        return select_by_classical_ic(engine, method, feasible, min_gap)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def run_cell(
    spec: DgpSpec,
    methods: Iterable[str],
    n_reps: int,
    seed: int,
    n_lambdas: int = 30,
    min_gap: int = 2,
    m_max: int = 5,
) -> list[CellResult]:
    """Replicate one design cell and aggregate pce / scaled Hausdorff.

    Replication r uses ``seed + r``; every method sees the same draws.
    Failed solves count as incorrect detections and are tallied in
    ``n_failed``.
    """
    methods = [m.lower() for m in methods]
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    if n_reps < 1:
        raise ValueError(f"n_reps must be >= 1, got {n_reps}")

    correct = {m: 0 for m in methods}
    failed = {m: 0 for m in methods}
    hds = {m: [] for m in methods}

    for r in range(n_reps):
        data, true = generate(replace(spec, seed=seed + r))
        engine = SegmentCostEngine(data)
        for m in methods:
            try:
                res = _estimate(m, engine, data, n_lambdas, min_gap, m_max)
            except Exception:
                failed[m] += 1
                continue
            if res.n_breaks == true.n_breaks:
                correct[m] += 1
                hd = hausdorff(res.segmentation.breaks, true.breaks, spec.n_obs)
                if hd is not None:
                    hds[m].append(hd)

    return [
        CellResult(
            dgp=spec.family,
            param=_param_label(spec),
            n_obs=spec.n_obs,
            method=m,
            pce=100.0 * correct[m] / n_reps,
            hd_scaled=float(np.mean(hds[m])) if hds[m] else None,
            n_reps=n_reps,
            seed=seed,
            n_failed=failed[m],
        )
        for m in methods
    ]


def _param_label(spec: DgpSpec) -> str:
    if spec.family == "no_break_5":
        return f"sigma2={spec.sigma2:g}"
    if spec.family == "no_break_6":
        return f"a={spec.ar_coef:g}"
    if spec.family.startswith("many_breaks"):
        return f"sigma_u={spec.sigma_u:g},R={spec.n_regimes}"
    return f"sigma_u={spec.sigma_u:g}"


def _table_cells(table: int) -> Iterator[DgpSpec]:
    sizes = (100, 200, 500)
    if table == 1:
        for i in range(1, 5):
            for s in (0.5, 1.0, 1.5):
                for T in sizes:
                    yield DgpSpec(f"no_break_{i}", T, sigma_u=s)
        for s2 in (0.2, 0.3, 0.5):
            for T in sizes:
                yield DgpSpec("no_break_5", T, sigma2=s2)
        for a in (0.2, 0.5, 0.9):
            for T in sizes:
                yield DgpSpec("no_break_6", T, ar_coef=a)
    elif table == 2:
        for i in range(1, 7):
            for s in (0.5, 1.0, 1.5):
                for T in sizes:
                    yield DgpSpec(f"one_break_{i}", T, sigma_u=s)
    elif table == 3:
        for s in (0.2, 0.5):
            for R in (6, 10, 20):
                yield DgpSpec("many_breaks_1", 30 * R, sigma_u=s, n_regimes=R)
        for s in (0.2, 0.5):
            for T in (150, 300, 600):
                yield DgpSpec("many_breaks_2", T, sigma_u=s, n_regimes=10)
    else:
        raise ValueError(f"table must be 1, 2 or 3, got {table}")


def run_table(
    table: int,
    methods: Iterable[str] = ("mio_dp",),
    n_reps: int = 200,
    seed: int = 0,
    dgp_filter: str | None = None,
    n_obs_filter: Iterable[int] | None = None,
    n_lambdas: int = 30,
    min_gap: int = 2,
    m_max: int = 5,
) -> Iterator[CellResult]:
    """Stream aggregated rows for one of the three benchmark tables.

    ``dgp_filter`` keeps designs whose name contains the given substring;
    ``n_obs_filter`` keeps the listed sample sizes. Deterministic for a
    fixed (table, methods, n_reps, seed) configuration.
    """
    methods = tuple(methods)
    sizes = set(n_obs_filter) if n_obs_filter else None
    for spec in _table_cells(table):
        if dgp_filter and dgp_filter not in spec.family:
            continue
        if sizes and spec.n_obs not in sizes:
            continue
        yield from run_cell(
            spec, methods, n_reps, seed, n_lambdas=n_lambdas, min_gap=min_gap, m_max=m_max
        )


def write_csv(rows: Iterable[CellResult], fh) -> int:
    """Write cell rows as CSV; returns the number of rows written."""
    writer = csv.writer(fh)
    writer.writerow(
        ["dgp", "param", "T", "method", "pce", "hd_scaled", "n_reps", "seed", "n_failed"]
    )
    n = 0
    for row in rows:
        writer.writerow(
            [
                row.dgp,
                row.param,
                row.n_obs,
                row.method,
                f"{row.pce:.6g}",
                "" if row.hd_scaled is None else f"{row.hd_scaled:.6g}",
                row.n_reps,
                row.seed,
                row.n_failed,
            ]
        )
        n += 1
    return n
