"""Post-detection inference on per-regime regression coefficients.

Given a break set with the correct count, the restricted estimator
stacks one OLS fit per regime (a block-diagonal design), and the scaled
coefficient vector is asymptotically normal with sandwich covariance
``psi^{-1} phi psi^{-1}``. ``psi`` is the scaled design moment matrix and
``phi`` the scaled residual-weighted moment matrix, estimated here with
a Bartlett-kernel HAC weighting within each regime (cross-regime blocks
are exactly zero). ``hac_lags = 0`` degenerates to the
heteroskedasticity-only plug-in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Dataset, Segmentation

__all__ = ["InferenceReport", "infer", "default_hac_lags"]

_Z_95 = 1.96


def default_hac_lags(n_obs: int) -> int:
    """Conventional Bartlett bandwidth floor(4 (T/100)^(2/9))."""
    return int(np.floor(4.0 * (n_obs / 100.0) ** (2.0 / 9.0)))


@dataclass(frozen=True, eq=False)
class InferenceReport:
    """Restricted per-regime estimates with sandwich standard errors.

    ``alpha`` stacks one coefficient vector per regime, shape (m+1, p);
    ``se``, ``ci_lower`` and ``ci_upper`` are aligned with it. ``psi``,
    ``phi`` and ``cov`` are the (m+1)p square scaled moment matrices (the
    covariance applies to the root-regime-length scaled estimator), and
    ``resid`` is the stacked residual series.
    """

    segmentation: Segmentation
    alpha: np.ndarray
    se: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    cov: np.ndarray
    resid: np.ndarray
    regime_lengths: tuple[int, ...]
    hac_lags: int

    def to_dict(self) -> dict:
        bounds = self.segmentation.bounds
        return {
            "hac_lags": self.hac_lags,
            "regimes": [
                {
                    "start": int(bounds[j] + 1),
                    "end": int(bounds[j + 1]),
                    "coef": [float(c) for c in self.alpha[j]],
                    "se": [float(s) for s in self.se[j]],
                    "ci_lower": [float(c) for c in self.ci_lower[j]],
                    "ci_upper": [float(c) for c in self.ci_upper[j]],
                }
                for j in range(len(self.regime_lengths))
            ],
        }


def _bartlett_omega(v: np.ndarray, lags: int) -> np.ndarray:
    """Sum_t v_t v_t' plus Bartlett-weighted autocovariance cross terms."""
    omega = v.T @ v
    n = v.shape[0]
    for lag in range(1, min(lags, n - 1) + 1):
        w = 1.0 - lag / (lags + 1.0)
        gamma = v[lag:].T @ v[:-lag]
        omega += w * (gamma + gamma.T)
    return omega


def infer(data: Dataset, seg: Segmentation, hac_lags: int | None = None) -> InferenceReport:
    """Sandwich-covariance inference for a given segmentation.

    Parameters
    ----------
    data : Dataset
    seg : Segmentation
        Break set to condition on (typically a fixed-count solve at the
        estimated break count). Coefficients are re-estimated per regime.
    hac_lags : int, optional
        Bartlett bandwidth; 0 means the heteroskedasticity-only plug-in.
        Defaults to :func:`default_hac_lags`.

    Raises
    ------
    ValueError
        If a regime is shorter than p + 1 observations.
    numpy.linalg.LinAlgError
        If a regime design moment matrix is singular.
    """
    if seg.n_obs != data.n_obs:
        raise ValueError("segmentation does not match the sample length")
    p = data.n_features
    if hac_lags is None:
        hac_lags = default_hac_lags(data.n_obs)
    if hac_lags < 0:
        raise ValueError(f"hac_lags must be nonnegative, got {hac_lags}")

    bounds = seg.bounds
    lengths = tuple(int(e - s) for s, e in zip(bounds[:-1], bounds[1:]))
    for j, n_j in enumerate(lengths):
        if n_j < p + 1:
            raise ValueError(
                f"regime {j} has {n_j} observations, need at least {p + 1} "
                f"for inference with p={p}"
            )

    n_reg = len(lengths)
    alpha = np.empty((n_reg, p))
    se = np.empty((n_reg, p))
    psi = np.zeros((n_reg * p, n_reg * p))
    phi = np.zeros_like(psi)
    cov = np.zeros_like(psi)
    resid = np.empty(data.n_obs)

    for j, (s, e) in enumerate(zip(bounds[:-1], bounds[1:])):
        Xj, yj = data.X[s:e], data.y[s:e]
        n_j = e - s
        G = Xj.T @ Xj
        eig_min = float(np.linalg.eigvalsh(G).min())
        if eig_min <= 1e-10:
            raise np.linalg.LinAlgError(
                f"regime {j} design moment matrix is singular (min eigenvalue "
                f"{eig_min:.3g})"
            )
        a_j = np.linalg.solve(G, Xj.T @ yj)
        u_j = yj - Xj @ a_j
        alpha[j] = a_j
        resid[s:e] = u_j

        psi_j = G / n_j
        phi_j = _bartlett_omega(Xj * u_j[:, None], hac_lags) / n_j
        psi_inv = np.linalg.inv(psi_j)
        cov_j = psi_inv @ phi_j @ psi_inv

        sl = slice(j * p, (j + 1) * p)
        psi[sl, sl] = psi_j
        phi[sl, sl] = phi_j
        cov[sl, sl] = cov_j
        # Undo the root-length scaling to get coefficient-level errors.
        se[j] = np.sqrt(np.maximum(np.diag(cov_j), 0.0) / n_j)

    return InferenceReport(
        segmentation=seg,
        alpha=alpha,
        se=se,
        ci_lower=alpha - _Z_95 * se,
        ci_upper=alpha + _Z_95 * se,
        psi=psi,
        phi=phi,
        cov=cov,
        resid=resid,
        regime_lengths=lengths,
        hac_lags=int(hac_lags),
    )
