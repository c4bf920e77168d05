import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l0breaks import Dataset, SegmentCostEngine

from conftest import random_instance


def make_engine(y, X):
    return SegmentCostEngine(Dataset(y=np.asarray(y, float), X=np.asarray(X, float)))


class TestBuild:
    def test_prefix_gram_cumulative_ones(self):
        eng = make_engine([1.0, 1, 1], np.ones((3, 1)))
        assert eng.prefix_gram[:, 0, 0].tolist() == [0, 1, 2, 3]

    def test_prefix_xy_cumulative(self):
        eng = make_engine([2.0, 4.0], np.ones((2, 1)))
        assert eng.prefix_xy[:, 0].tolist() == [0, 2, 6]

    def test_prefix_yy_total(self):
        rng = np.random.default_rng(0)
        y = rng.standard_normal(50)
        eng = make_engine(y, rng.standard_normal((50, 2)))
        assert float(eng.prefix_yy[-1]) == pytest.approx(float(y @ y), rel=1e-14)

    def test_prefix_differences_reproduce_rows(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((20, 2))
        y = rng.standard_normal(20)
        eng = make_engine(y, X)
        for t in (0, 7, 19):
            np.testing.assert_allclose(
                np.asarray(eng.prefix_gram[t + 1] - eng.prefix_gram[t], float),
                np.outer(X[t], X[t]),
                rtol=1e-12,
                atol=1e-12,
            )

    def test_rejects_negative_ridge(self):
        with pytest.raises(ValueError):
            SegmentCostEngine(
                Dataset(y=np.ones(3), X=np.ones((3, 1))), ridge_eps=-1.0
            )


class TestCost:
    def test_constant_series(self):
        eng = make_engine([1.0, 1, 1], np.ones((3, 1)))
        fit = eng.cost(0, 3)
        assert fit.sse == 0.0
        assert fit.coef[0] == pytest.approx(1.0)

    def test_two_point_ols(self):
        eng = make_engine([0.0, 1.0], np.ones((2, 1)))
        fit = eng.cost(0, 2)
        assert fit.sse == pytest.approx(0.5)
        assert fit.coef[0] == pytest.approx(0.5)

    def test_single_point_exact_interpolation(self):
        eng = make_engine([3.0, 7.0], np.array([[2.0], [1.0]]))
        fit = eng.cost(0, 1)
        assert fit.sse == 0.0
        assert fit.coef[0] == pytest.approx(1.5)

    def test_window_shorter_than_p_is_degenerate_exact_fit(self):
        rng = np.random.default_rng(2)
        eng = make_engine(rng.standard_normal(6), rng.standard_normal((6, 3)))
        fit = eng.cost(0, 2)
        assert fit.degenerate
        assert fit.sse == 0.0

    def test_out_of_range(self):
        eng = make_engine([1.0, 2.0], np.ones((2, 1)))
        with pytest.raises(IndexError):
            eng.cost(0, 3)
        with pytest.raises(IndexError):
            eng.cost(2, 2)

    def test_singular_gram_gets_ridge_flag(self):
        # identical zero regressor rows: Gram is exactly singular
        eng = make_engine([1.0, 2.0, 3.0], np.zeros((3, 1)))
        fit = eng.cost(0, 3)
        assert fit.degenerate
        assert fit.sse >= 0.0

    def test_batch_matches_scalar_bitwise(self):
        rng = np.random.default_rng(3)
        data = random_instance(rng, 40, 2)
        eng = SegmentCostEngine(data)
        starts, ends = [], []
        for _ in range(200):
            s = int(rng.integers(0, 39))
            e = int(rng.integers(s + 1, 41))
            starts.append(s)
            ends.append(e)
        batch = eng.sse_many(np.array(starts), np.array(ends))
        for s, e, v in zip(starts, ends, batch):
            assert eng.cost(s, e).sse == v


class TestCostOracle:
    def test_matches_dense_lstsq_on_random_windows(self):
        rng = np.random.default_rng(10)
        for p in (1, 2, 3):
            data = random_instance(rng, 60, p)
            eng = SegmentCostEngine(data)
            for _ in range(333):
                s = int(rng.integers(0, 60 - p))
                e = int(rng.integers(s + p, 61))
                fit = eng.cost(s, e)
                coef, *_ = np.linalg.lstsq(data.X[s:e], data.y[s:e], rcond=None)
                resid = data.y[s:e] - data.X[s:e] @ coef
                sse = float(resid @ resid)
                assert fit.sse == pytest.approx(sse, rel=1e-8, abs=1e-10)

    def test_scaling_y_scales_cost_quadratically(self):
        rng = np.random.default_rng(11)
        data = random_instance(rng, 30, 2)
        eng1 = SegmentCostEngine(data)
        eng3 = SegmentCostEngine(Dataset(y=3.0 * data.y, X=data.X))
        for s, e in [(0, 30), (4, 17), (20, 29)]:
            assert eng3.cost(s, e).sse == pytest.approx(
                9.0 * eng1.cost(s, e).sse, rel=1e-9
            )


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    T=st.integers(6, 50),
    p=st.integers(1, 2),
    data=st.data(),
)
def test_superadditivity_of_split(seed, T, p, data):
    """Splitting a window never increases total sse (up to tolerance)."""
    rng = np.random.default_rng(seed)
    eng = SegmentCostEngine(random_instance(rng, T, p))
    s = data.draw(st.integers(0, T - 2))
    e = data.draw(st.integers(s + 2, T))
    m = data.draw(st.integers(s + 1, e - 1))
    assert eng.cost(s, e).sse >= eng.cost(s, m).sse + eng.cost(m, e).sse - 1e-7
