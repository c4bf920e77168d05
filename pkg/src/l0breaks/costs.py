"""Amortized-O(1) least-squares costs for arbitrary time windows.

The engine stores prefix sums of the per-observation Gram matrices
``x_t x_t'``, cross products ``x_t y_t`` and squared responses, so the
least-squares cost of any half-open window ``[s, e)`` reduces to one
small linear solve on differenced prefixes:

    sse(s, e) = sum_{t in [s,e)} y_t^2  -  b' G^{-1} b,

with ``G`` the windowed Gram and ``b`` the windowed cross product.
Prefix sums are accumulated in extended precision (``np.longdouble``)
because the differencing is cancellation-prone on long series.

All solvers in this package price segments through one shared code path
(:meth:`SegmentCostEngine.sse_many`), which keeps their objective values
bit-comparable.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import Dataset

__all__ = ["SegmentFit", "SegmentCostEngine"]

# Relative threshold below which a window SSE is snapped to exactly 0.0.
# Exact-fit windows produce cancellation noise around +-1e-16 * scale;
# snapping makes ties between solver paths exact instead of fuzzy.
_ZERO_SNAP = 1e-12


class SegmentFit(NamedTuple):
    """Result of fitting one window: cost, coefficients, rank status."""

    sse: float
    coef: np.ndarray
    degenerate: bool


class SegmentCostEngine:
    """Precomputed prefix moments enabling fast segment cost queries.

    Parameters
    ----------
    data : Dataset
        Observations to index.
    ridge_eps : float, optional
        Absolute Tikhonov bump added to a windowed Gram matrix when it is
        singular. Defaults to ``1e-10`` times the average diagonal of the
        full-sample Gram. Rank-deficient windows are priced (with a
        degeneracy flag) rather than rejected, because the partitioning
        recursions must be able to price every admissible window.

    Notes
    -----
    The engine is immutable after construction; cost queries are
    read-only and safe to issue concurrently.
    """

    def __init__(self, data: Dataset, ridge_eps: float | None = None):
        self.data = data
        T, p = data.n_obs, data.n_features
        X = data.X.astype(np.longdouble)
        y = data.y.astype(np.longdouble)

        self.prefix_gram = np.zeros((T + 1, p, p), dtype=np.longdouble)
        np.cumsum(X[:, :, None] * X[:, None, :], axis=0, out=self.prefix_gram[1:])
        self.prefix_xy = np.zeros((T + 1, p), dtype=np.longdouble)
        np.cumsum(X * y[:, None], axis=0, out=self.prefix_xy[1:])
        self.prefix_yy = np.zeros(T + 1, dtype=np.longdouble)
        np.cumsum(y * y, axis=0, out=self.prefix_yy[1:])

        if ridge_eps is None:
            trace_scale = float(np.trace(self.prefix_gram[T])) / (T * p)
            ridge_eps = 1e-10 * max(trace_scale, 1e-12)
        elif ridge_eps < 0:
            raise ValueError(f"ridge_eps must be nonnegative, got {ridge_eps}")
        self.ridge_eps = float(ridge_eps)

        for arr in (self.prefix_gram, self.prefix_xy, self.prefix_yy):
            arr.flags.writeable = False

    @property
    def n_obs(self) -> int:
        return self.data.n_obs

    @property
    def n_features(self) -> int:
        return self.data.n_features

    def _window_moments(self, starts, ends):
        starts = np.asarray(starts, dtype=np.intp)
        ends = np.asarray(ends, dtype=np.intp)
        G = (self.prefix_gram[ends] - self.prefix_gram[starts]).astype(np.float64)
        b = (self.prefix_xy[ends] - self.prefix_xy[starts]).astype(np.float64)
        yy = (self.prefix_yy[ends] - self.prefix_yy[starts]).astype(np.float64)
        return G, b, yy

    def _finish(self, sse_raw: np.ndarray, yy: np.ndarray) -> np.ndarray:
        sse = np.where(sse_raw <= _ZERO_SNAP * yy, 0.0, sse_raw)
        return np.maximum(sse, 0.0)

    def _fit_one(self, G, b, yy, n_w) -> SegmentFit:
        p = G.shape[0]
        degenerate = False
        if n_w < p:
            coef = np.linalg.lstsq(G, b, rcond=None)[0]
            degenerate = True
        else:
            try:
                coef = np.linalg.solve(G[None], b[None, :, None])[0, :, 0]
            except np.linalg.LinAlgError:
                degenerate = True
                Gr = G + self.ridge_eps * np.eye(p)
                try:
                    coef = np.linalg.solve(Gr[None], b[None, :, None])[0, :, 0]
                except np.linalg.LinAlgError:
                    coef = np.linalg.lstsq(G, b, rcond=None)[0]
        # Same reduction as the batched path so both yield identical floats.
        sse_raw = yy - np.einsum("ij,ij->i", b[None, :], coef[None, :])
        sse = float(self._finish(sse_raw, np.array([yy]))[0])
        return SegmentFit(sse, coef, degenerate)

    def cost(self, s: int, e: int) -> SegmentFit:
        """Least-squares cost of window ``[s, e)`` and its coefficient.

        Windows shorter than ``p`` interpolate exactly via the minimum
        norm solution; singular Gram matrices are regularized with
        ``ridge_eps``. Both cases set the ``degenerate`` flag. Costs are
        never negative.
        """
        if not 0 <= s < e <= self.n_obs:
            raise IndexError(f"window [{s}, {e}) outside [0, {self.n_obs}]")
        G, b, yy = self._window_moments([s], [e])
        return self._fit_one(G[0], b[0], float(yy[0]), e - s)

    def sse_many(self, starts, ends) -> np.ndarray:
        """Vectorized window costs; same values as :meth:`cost` per window.

        ``starts`` and ``ends`` are equal-length index arrays. This is the
        hot path of the partitioning recursions.
        """
        starts = np.asarray(starts, dtype=np.intp)
        ends = np.broadcast_to(np.asarray(ends, dtype=np.intp), starts.shape)
        G, b, yy = self._window_moments(starts, ends)
        n_w = ends - starts
        regular = n_w >= self.n_features
        out = np.empty(starts.shape[0], dtype=np.float64)
        if regular.all():
            try:
                coef = np.linalg.solve(G, b[..., None])[..., 0]
                sse_raw = yy - np.einsum("ij,ij->i", b, coef)
                return self._finish(sse_raw, yy)
            except np.linalg.LinAlgError:
                pass
        for i in range(starts.shape[0]):
            out[i] = self._fit_one(G[i], b[i], float(yy[i]), int(n_w[i])).sse
        return out

    def total_sse(self) -> float:
        """Cost of the full sample fitted with a single coefficient vector."""
        return self.cost(0, self.n_obs).sse
