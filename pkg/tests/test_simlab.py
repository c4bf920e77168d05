import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from l0breaks import DgpSpec, generate, hausdorff, run_cell, run_table
from l0breaks.simlab import write_csv

break_sets = st.lists(st.integers(1, 99), min_size=0, max_size=6, unique=True)


class TestGenerate:
    @pytest.mark.parametrize(
        "family",
        [f"no_break_{i}" for i in range(1, 7)]
        + [f"one_break_{i}" for i in range(1, 7)]
        + ["many_breaks_2"],
    )
    def test_same_seed_bit_identical(self, family):
        spec = DgpSpec(family, 60, sigma_u=0.5, seed=42, n_regimes=10)
        d1, s1 = generate(spec)
        d2, s2 = generate(spec)
        assert np.array_equal(d1.y, d2.y)
        assert np.array_equal(d1.X, d2.X)
        assert s1.breaks == s2.breaks

    def test_different_seeds_differ(self):
        d1, _ = generate(DgpSpec("no_break_1", 50, seed=1))
        d2, _ = generate(DgpSpec("no_break_1", 50, seed=2))
        assert not np.array_equal(d1.y, d2.y)

    def test_ar_regressor_stationary_variance(self):
        # AR(1) with rho 0.5 and innovation variance 0.75 has variance 1
        d, _ = generate(DgpSpec("no_break_2", 100_000, seed=7))
        assert float(d.X.var()) == pytest.approx(1.0, abs=0.02)

    def test_one_break_truth(self):
        d, true = generate(DgpSpec("one_break_1", 100, seed=3))
        assert true.breaks == (50,)
        assert true.coefs.ravel().tolist() == [0.0, 1.0]

    def test_lagged_response_truth(self):
        d, true = generate(DgpSpec("one_break_6", 80, seed=4))
        assert true.breaks == (40,)
        assert true.coefs.ravel().tolist() == [0.2, 0.8]
        # x is the lagged response: y_t depends on x_t linearly
        assert d.X.shape == (80, 1)

    def test_many_breaks_truth(self):
        d, true = generate(DgpSpec("many_breaks_1", 180, n_regimes=6, seed=5))
        assert true.breaks == (30, 60, 90, 120, 150)
        assert true.coefs.ravel().tolist() == [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]

    def test_variance_break_family(self):
        d, true = generate(DgpSpec("no_break_5", 4000, sigma1=0.1, sigma2=0.5, seed=6))
        resid = d.y - d.X[:, 0]
        assert resid[:2000].std() == pytest.approx(0.1, rel=0.15)
        assert resid[2000:].std() == pytest.approx(0.5, rel=0.15)

    def test_inconsistent_geometry(self):
        with pytest.raises(ValueError):
            DgpSpec("many_breaks_1", 100, n_regimes=7)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            DgpSpec("no_break_9", 50)


class TestHausdorff:
    def test_identical_sets(self):
        assert hausdorff([50], [50], 100) == 0.0

    def test_two_positions(self):
        assert hausdorff([50], [52], 100) == pytest.approx(2.0)

    def test_unmatched_break_dominates(self):
        assert hausdorff([30, 60], [30], 100) == pytest.approx(30.0)

    def test_empty_conventions(self):
        assert hausdorff([], [], 200) == 0.0
        assert hausdorff([], [10], 200) is None
        assert hausdorff([10], [], 200) is None

    @settings(max_examples=80, deadline=None)
    @given(a=break_sets, b=break_sets)
    def test_symmetry(self, a, b):
        assert hausdorff(a, b, 100) == hausdorff(b, a, 100)

    @settings(max_examples=80, deadline=None)
    @given(
        a=break_sets.filter(len), b=break_sets.filter(len), c=break_sets.filter(len)
    )
    def test_triangle_inequality(self, a, b, c):
        ab = hausdorff(a, b, 100)
        bc = hausdorff(b, c, 100)
        ac = hausdorff(a, c, 100)
        assert ac <= ab + bc + 1e-12


class TestRunners:
    def test_run_cell_deterministic(self):
        spec = DgpSpec("one_break_1", 40, sigma_u=0.5)
        r1 = run_cell(spec, ["mio_dp"], n_reps=3, seed=11, n_lambdas=8)
        r2 = run_cell(spec, ["mio_dp"], n_reps=3, seed=11, n_lambdas=8)
        assert r1 == r2

    def test_conditional_hd_bookkeeping(self):
        # clean data: every replication detects the break at distance 0
        spec = DgpSpec("one_break_1", 60, sigma_u=0.1)
        (row,) = run_cell(spec, ["mio_dp"], n_reps=4, seed=1, n_lambdas=10)
        assert row.pce == 100.0
        assert row.hd_scaled == pytest.approx(0.0, abs=0.5)
        assert row.n_failed == 0

    def test_unknown_method_rejected(self):
        spec = DgpSpec("no_break_1", 30)
        with pytest.raises(ValueError):
            run_cell(spec, ["sup_f"], n_reps=1, seed=0)

    def test_rep_count_validated(self):
        spec = DgpSpec("no_break_1", 30)
        with pytest.raises(ValueError):
            run_cell(spec, ["mio_dp"], n_reps=0, seed=0)

    def test_methods_share_draws_and_report_rows(self):
        spec = DgpSpec("one_break_1", 40, sigma_u=0.3)
        rows = run_cell(spec, ["mio_dp", "bic", "lwz"], n_reps=2, seed=5, n_lambdas=6)
        assert [r.method for r in rows] == ["mio_dp", "bic", "lwz"]
        assert len({r.seed for r in rows}) == 1

    def test_run_table_filters(self):
        rows = list(
            run_table(
                2,
                methods=["bic"],
                n_reps=1,
                seed=3,
                dgp_filter="one_break_1",
                n_obs_filter=[100],
                n_lambdas=4,
            )
        )
        assert len(rows) == 3  # three sigma_u values at T=100
        assert all(r.n_obs == 100 and r.dgp == "one_break_1" for r in rows)

    def test_write_csv_layout(self, tmp_path):
        spec = DgpSpec("one_break_1", 40, sigma_u=0.5)
        rows = run_cell(spec, ["mio_dp"], n_reps=2, seed=7, n_lambdas=6)
        out = tmp_path / "cells.csv"
        with open(out, "w", newline="") as fh:
            n = write_csv(rows, fh)
        lines = out.read_text().strip().splitlines()
        assert n == 1
        assert lines[0].split(",")[:5] == ["dgp", "param", "T", "method", "pce"]
        assert len(lines) == 2
