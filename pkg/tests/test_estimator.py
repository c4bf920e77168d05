import numpy as np
import pytest
from sklearn.base import clone

from l0breaks import L0BreakRegression, recompute_objective
from l0breaks.model import Dataset


def step_sample(n1=20, n2=20, lo=0.0, hi=5.0, noise=0.01, seed=0):
    rng = np.random.default_rng(seed)
    y = np.concatenate((np.full(n1, lo), np.full(n2, hi)))
    y += noise * rng.standard_normal(n1 + n2)
    return np.ones((n1 + n2, 1)), y


class TestSklearnProtocol:
    def test_get_set_params_round_trip(self):
        est = L0BreakRegression(lam=0.5, min_gap=3, solver="bnb")
        params = est.get_params()
        assert params["lam"] == 0.5 and params["min_gap"] == 3
        est2 = L0BreakRegression().set_params(**params)
        assert est2.get_params() == params

    def test_clone(self):
        est = L0BreakRegression(lam=1.0, n_lambdas=5)
        cl = clone(est)
        assert cl.get_params() == est.get_params()

    def test_unfitted_predict_raises(self):
        with pytest.raises(RuntimeError):
            L0BreakRegression().predict(np.ones((4, 1)))

    def test_bad_solver_name(self):
        X, y = step_sample()
        with pytest.raises(ValueError):
            L0BreakRegression(solver="gurobi").fit(X, y)


class TestFit:
    def test_auto_tuned_step(self):
        X, y = step_sample()
        est = L0BreakRegression().fit(X, y)
        assert est.n_breaks_ == 1
        assert est.breaks_.tolist() == [20]
        assert est.coef_[0, 0] == pytest.approx(0.0, abs=0.05)
        assert est.coef_[1, 0] == pytest.approx(5.0, abs=0.05)
        assert est.path_ is not None
        assert est.lambda_ > 0

    def test_fixed_lambda(self):
        X, y = step_sample()
        est = L0BreakRegression(lam=0.5).fit(X, y)
        assert est.lambda_ == 0.5
        assert est.path_ is None
        data = Dataset(y=y, X=X)
        assert est.objective_ == pytest.approx(
            recompute_objective(data, est.result_.segmentation, 0.5), rel=1e-9
        )

    def test_fixed_m(self):
        X, y = step_sample()
        est = L0BreakRegression(fixed_m=2).fit(X, y)
        assert est.n_breaks_ == 2

    def test_bnb_backend_agrees_with_dp(self):
        X, y = step_sample(noise=0.3, seed=5)
        dp = L0BreakRegression(lam=1.0, solver="dp").fit(X, y)
        bb = L0BreakRegression(lam=1.0, solver="bnb").fit(X, y)
        assert dp.breaks_.tolist() == bb.breaks_.tolist()
        assert dp.objective_ == pytest.approx(bb.objective_, abs=1e-7)

    def test_accepts_1d_x(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(50)
        y = np.r_[0.0 * x[:25], 2.0 * x[25:]] + 0.05 * rng.standard_normal(50)
        est = L0BreakRegression().fit(x, y)
        assert est.n_breaks_ == 1


class TestPredict:
    def test_in_sample_fitted_values(self):
        X, y = step_sample()
        est = L0BreakRegression().fit(X, y)
        fitted = est.predict(X)
        np.testing.assert_allclose(fitted[:20], est.coef_[0, 0])
        np.testing.assert_allclose(fitted[20:], est.coef_[1, 0])

    def test_extends_last_regime(self):
        X, y = step_sample()
        est = L0BreakRegression().fit(X, y)
        out = est.predict(np.ones((45, 1)))
        np.testing.assert_allclose(out[40:], est.coef_[1, 0])

    def test_score_is_high_on_clean_steps(self):
        X, y = step_sample(noise=0.05)
        est = L0BreakRegression().fit(X, y)
        assert est.score(X, y) > 0.99

    def test_feature_mismatch(self):
        X, y = step_sample()
        est = L0BreakRegression().fit(X, y)
        with pytest.raises(ValueError):
            est.predict(np.ones((40, 2)))


class TestInferenceMethod:
    def test_report_has_intervals(self):
        X, y = step_sample(noise=0.2)
        est = L0BreakRegression().fit(X, y)
        rep = est.inference(hac_lags=0)
        assert rep.alpha.shape == (2, 1)
        assert np.all(rep.ci_lower <= rep.alpha) and np.all(rep.alpha <= rep.ci_upper)
