import numpy as np
import pytest

from l0breaks import (
    Dataset,
    SegmentCostEngine,
    build_grid,
    fit_path,
    select_by_classical_ic,
    select_by_ic,
    solve_fixed_m,
)
from l0breaks.tuning import classical_ic_table

from conftest import random_instance


class TestBuildGrid:
    def test_step_data_ceiling(self):
        eng = SegmentCostEngine(Dataset(y=[0.0, 0, 2, 2], X=np.ones((4, 1))))
        grid = build_grid(eng, 5)
        assert grid[0] == pytest.approx(4.0)  # full-sample sse

    def test_constant_series_degenerates(self):
        eng = SegmentCostEngine(Dataset(y=np.ones(10), X=np.ones((10, 1))))
        grid = build_grid(eng, 7)
        assert grid.tolist() == [1e-8]

    def test_two_point_grid_spans_three_decades(self):
        rng = np.random.default_rng(0)
        eng = SegmentCostEngine(random_instance(rng, 20, 1))
        grid = build_grid(eng, 2)
        assert grid[0] / grid[1] == pytest.approx(1000.0)

    def test_grid_is_decreasing(self):
        rng = np.random.default_rng(1)
        eng = SegmentCostEngine(random_instance(rng, 20, 1))
        grid = build_grid(eng, 12)
        assert np.all(np.diff(grid) < 0)


class TestPath:
    def test_break_count_monotone_along_path(self):
        rng = np.random.default_rng(2)
        eng = SegmentCostEngine(random_instance(rng, 80, 1, jump=2.0))
        path = fit_path(eng, build_grid(eng, 20))
        counts = path.n_breaks
        assert np.all(np.diff(counts) >= 0)

    def test_no_breaks_at_grid_top(self):
        for seed in range(6):
            rng = np.random.default_rng(seed)
            eng = SegmentCostEngine(random_instance(rng, 40, 1, jump=1.0))
            path = fit_path(eng, build_grid(eng, 8))
            assert path.results[0].n_breaks == 0

    def test_rows_serializable(self):
        rng = np.random.default_rng(3)
        eng = SegmentCostEngine(random_instance(rng, 30, 1))
        path = fit_path(eng, build_grid(eng, 4))
        rows = path.rows()
        assert len(rows) == 4
        assert set(rows[0]) == {"lambda", "n_breaks", "breaks", "sse", "ic"}


class TestSelectByIc:
    def test_obvious_jump_detected(self):
        rng = np.random.default_rng(4)
        y = np.concatenate((np.zeros(10), np.full(10, 5.0))) + 0.01 * rng.standard_normal(20)
        eng = SegmentCostEngine(Dataset(y=y, X=np.ones((20, 1))))
        sel = select_by_ic(fit_path(eng, build_grid(eng, 20)))
        assert sel.n_breaks == 1
        assert sel.segmentation.breaks == (10,)

    def test_single_point_path(self):
        rng = np.random.default_rng(5)
        eng = SegmentCostEngine(random_instance(rng, 25, 1))
        path = fit_path(eng, [0.5])
        sel = select_by_ic(path)
        assert sel.objective == path.results[0].objective

    def test_invariant_to_duplicated_lambda(self):
        rng = np.random.default_rng(6)
        eng = SegmentCostEngine(random_instance(rng, 40, 1, jump=2.0))
        grid = build_grid(eng, 10)
        sel1 = select_by_ic(fit_path(eng, grid))
        sel2 = select_by_ic(fit_path(eng, np.concatenate([grid, grid])))
        assert sel1.n_breaks == sel2.n_breaks
        assert sel1.segmentation.breaks == sel2.segmentation.breaks

    def test_mostly_no_breaks_on_pure_noise(self):
        hits = 0
        n = 40
        for i in range(n):
            rng = np.random.default_rng(100 + i)
            data = Dataset(y=rng.standard_normal(200), X=np.ones((200, 1)))
            eng = SegmentCostEngine(data)
            sel = select_by_ic(fit_path(eng, build_grid(eng, 20)))
            hits += sel.n_breaks == 0
        assert hits >= int(0.9 * n)


class TestClassicalIc:
    def test_m_max_zero_returns_full_fit(self):
        rng = np.random.default_rng(7)
        eng = SegmentCostEngine(random_instance(rng, 30, 1, jump=5.0))
        for crit in ("bic", "lwz"):
            res = select_by_classical_ic(eng, crit, m_max=0)
            assert res.n_breaks == 0

    def test_bic_finds_clean_break(self):
        rng = np.random.default_rng(8)
        y = np.array([0.0, 0, 0, 2, 2, 2]) + 1e-3 * rng.standard_normal(6)
        eng = SegmentCostEngine(Dataset(y=y, X=np.ones((6, 1))))
        res = select_by_classical_ic(eng, "bic", m_max=2)
        assert res.n_breaks == 1

    def test_scores_match_manual_formula(self):
        rng = np.random.default_rng(9)
        eng = SegmentCostEngine(random_instance(rng, 40, 2, jump=2.0))
        T, p = 40, 2
        table = classical_ic_table(eng, m_max=3)
        for m in range(4):
            sse = solve_fixed_m(eng, m).objective
            n_par = p * (m + 1) + m
            bic = np.log(sse / T) + n_par * np.log(T) / T
            lwz = np.log(sse / (T - p * (m + 1))) + n_par * 0.299 * np.log(T) ** 2.1 / T
            assert table["bic"][m] == pytest.approx(bic, rel=1e-12)
            assert table["lwz"][m] == pytest.approx(lwz, rel=1e-12)

    def test_constant_sse_prefers_smallest_m(self):
        # constant series: every fixed-m fit has sse 0, penalty decides
        eng = SegmentCostEngine(Dataset(y=np.full(12, 3.0), X=np.ones((12, 1))))
        for crit in ("bic", "lwz"):
            assert select_by_classical_ic(eng, crit, m_max=3).n_breaks == 0

    def test_unknown_criterion(self):
        rng = np.random.default_rng(10)
        eng = SegmentCostEngine(random_instance(rng, 20, 1))
        with pytest.raises(ValueError):
            select_by_classical_ic(eng, "aic", m_max=1)

    def test_infeasible_m_max(self):
        rng = np.random.default_rng(11)
        eng = SegmentCostEngine(random_instance(rng, 8, 1))
        with pytest.raises(ValueError):
            select_by_classical_ic(eng, "bic", m_max=4)
