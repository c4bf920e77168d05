"""Scikit-learn style estimator for segmented time-series regression."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .bnb import choose_big_m, solve_miqp
from .costs import SegmentCostEngine
from .dp import solve_fixed_m, solve_l0
from .inference import InferenceReport, infer
from .model import Dataset, PenaltyConfig
from .tuning import build_grid, fit_path
from .validation import check_time_series

__all__ = ["L0BreakRegression"]


class L0BreakRegression(RegressorMixin, BaseEstimator):
    """Linear regression with an unknown number of coefficient breaks.

    Fits y_t = beta_t' x_t + u_t where beta_t is piecewise constant in t,
    by exactly minimizing the least-squares objective plus ``lam`` per
    break. Rows of ``X`` must be in time order. With ``lam=None`` the
    penalty is tuned on a geometric grid by an information criterion.

    Parameters
    ----------
    lam : float or None, default=None
        Break penalty. ``None`` tunes it over ``n_lambdas`` grid points.
    n_lambdas : int, default=30
        Grid size used when tuning.
    min_gap : int, default=2
        Minimum regime length (at least 2).
    solver : {"dp", "bnb"}, default="dp"
        Exact solver backend: optimal-partitioning dynamic program or
        branch and bound over break indicators. Both certify optimality.
    fixed_m : int or None, default=None
        Solve with exactly this many breaks instead of penalizing.
    big_m : float or None, default=None
        Coefficient-jump bound audited by the "bnb" backend; ``None``
        picks a level from the data (see ``choose_big_m``).
    ridge_eps : float or None, default=None
        Regularizer for rank-deficient window fits; ``None`` scales one
        from the data.

    Attributes
    ----------
    breaks_ : ndarray of int
        0-based indices at which a new regime starts.
    coef_ : ndarray of shape (n_breaks_ + 1, p)
        Per-regime coefficient vectors.
    n_breaks_ : int
    objective_ : float
        Attained penalized objective (pure sse when ``fixed_m`` is set).
    lambda_ : float
        Penalty actually used (the tuned value under ``lam=None``).
    result_ : SolverResult
    path_ : LambdaPath or None
        Per-penalty fits when tuning was used.

    Examples
    --------
    >>> import numpy as np
    >>> y = np.r_[np.zeros(20), 5 * np.ones(20)]
    >>> est = L0BreakRegression().fit(np.ones((40, 1)), y)
    >>> est.breaks_
    array([20])
    """

    def __init__(
        self,
        lam: float | None = None,
        n_lambdas: int = 30,
        min_gap: int = 2,
        solver: str = "dp",
        fixed_m: int | None = None,
        big_m: float | None = None,
        ridge_eps: float | None = None,
    ):
        self.lam = lam
        self.n_lambdas = n_lambdas
        self.min_gap = min_gap
        self.solver = solver
        self.fixed_m = fixed_m
        self.big_m = big_m
        self.ridge_eps = ridge_eps

    def fit(self, X, y):
        X, y = check_time_series(X, y)
        if self.solver not in ("dp", "bnb"):
            raise ValueError(f"solver must be 'dp' or 'bnb', got {self.solver!r}")
        data = Dataset(y=y, X=X)
        engine = SegmentCostEngine(data, ridge_eps=self.ridge_eps)
        big_m = self.big_m if self.big_m is not None else choose_big_m(data)

        def solve_at(lam: float, fixed_m: int | None = None):
            if self.solver == "bnb":
                cfg = PenaltyConfig(
                    lam=lam, big_m=big_m, min_gap=self.min_gap, fixed_m=fixed_m
                )
                return solve_miqp(engine, cfg)
            if fixed_m is not None:
                return solve_fixed_m(engine, fixed_m, self.min_gap)
            return solve_l0(engine, lam, self.min_gap)

        self.path_ = None
        if self.fixed_m is not None:
            result = solve_at(0.0, fixed_m=self.fixed_m)
            self.lambda_ = 0.0
        elif self.lam is not None:
            result = solve_at(float(self.lam))
            self.lambda_ = float(self.lam)
        else:
            grid = build_grid(engine, self.n_lambdas, self.min_gap)
            self.path_ = fit_path(
                engine,
                grid,
                self.min_gap,
                solver=lambda eng, lam, gap: solve_at(lam),
            )
            chosen = int(np.argmin(self.path_.ics))
            result = self.path_.results[chosen]
            self.lambda_ = float(self.path_.lambdas[chosen])

        self.result_ = result
        self.breaks_ = np.asarray(result.segmentation.breaks, dtype=int)
        self.coef_ = np.asarray(result.segmentation.coefs)
        self.n_breaks_ = result.n_breaks
        self.objective_ = result.objective
        self.n_features_in_ = X.shape[1]
        self._data = data
        return self

    def predict(self, X):
        """In-sample fitted values under the estimated regime schedule.

        ``X`` must have as many rows as the training sample; rows beyond
        the last break reuse the final regime's coefficients, so the
        schedule extends naturally if more rows are supplied.
        """
        if not hasattr(self, "result_"):
            raise RuntimeError("estimator is not fitted")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        regime = np.searchsorted(self.breaks_, np.arange(X.shape[0]), side="right")
        regime = np.minimum(regime, self.coef_.shape[0] - 1)
        return np.einsum("tj,tj->t", X, self.coef_[regime])

    def inference(self, hac_lags: int | None = None) -> InferenceReport:
        """Sandwich-covariance report for the fitted segmentation."""
        if not hasattr(self, "result_"):
            raise RuntimeError("estimator is not fitted")
        return infer(self._data, self.result_.segmentation, hac_lags=hac_lags)
