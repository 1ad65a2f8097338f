import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scsopt.core import UsageError
from scsopt.profiles import (
    ERROR_FLOOR,
    GRID_POINTS,
    ResultsTable,
    bench_tables,
    build_profile,
    ct_tables,
    performance_ratios,
    profile_curve,
    tau_grid,
    ten_percent_solved,
    write_profile_csv,
    write_profile_svg,
)


def table(t, solved=None):
    t = np.asarray(t, float)
    solved = np.ones(t.shape, bool) if solved is None else np.asarray(solved, bool)
    return ResultsTable([f"p{i}" for i in range(t.shape[0])], [f"s{j}" for j in range(t.shape[1])], t, solved)


class TestRatios:
    def test_two_by_two(self):
        r, r_max = performance_ratios(table([[1, 2], [3, 1]]))
        np.testing.assert_array_equal(r, [[1, 2], [3, 1]])
        assert r_max == 3.0

    def test_single_solver(self):
        r, r_max = performance_ratios(table([[5.0], [0.2], [7.0]]))
        np.testing.assert_array_equal(r, np.ones((3, 1)))
        assert r_max == 1.0

    def test_failure_gets_r_max(self):
        r, r_max = performance_ratios(table([[1.0, 9.0]], [[True, False]]))
        assert r_max > 1.0
        np.testing.assert_array_equal(r, [[1.0, r_max]])

    def test_failure_lies_beyond_every_finite_ratio(self):
        r, r_max = performance_ratios(table([[1, 2], [3, 1]], [[True, True], [True, False]]))
        assert r[1, 1] == r_max > 2.0

    def test_zero_best(self):
        r, _ = performance_ratios(table([[0.0, 0.0, 1.0]]))
        assert r[0, 0] == r[0, 1] == 1.0
        assert r[0, 2] > 1.0

    def test_negative_metric_rejected(self):
        with pytest.raises(UsageError):
            table([[-1.0, 1.0]])

    def test_shape_checked(self):
        with pytest.raises(UsageError):
            ResultsTable(["a"], ["x", "y"], np.ones((2, 2)), np.ones((2, 2), bool))

    @settings(max_examples=100, deadline=None)
    @given(arrays(float, (4, 3), elements=st.floats(0.01, 100)),
           arrays(float, 4, elements=st.floats(0.01, 100)),
           arrays(bool, (4, 3)))
    def test_invariant_under_row_scaling(self, t, scale, solved):
        r1, m1 = performance_ratios(table(t, solved))
        r2, m2 = performance_ratios(table(t * scale[:, None], solved))
        np.testing.assert_allclose(r1, r2, rtol=1e-12)
        assert m1 == pytest.approx(m2, rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(arrays(float, (5, 3), elements=st.floats(0.01, 100)), arrays(bool, (5, 3)))
    def test_ratios_at_least_one(self, t, solved):
        r, r_max = performance_ratios(table(t, solved))
        assert np.all(r >= 1.0) and np.all(r <= r_max)


class TestCurve:
    def test_at_one(self):
        r, _ = performance_ratios(table([[1, 2], [3, 1]]))
        assert profile_curve(r, 0, 1.0)[0] == 0.5
        assert profile_curve(r, 1, 1.0)[0] == 0.5

    def test_all_solved_reaches_one(self):
        r, r_max = performance_ratios(table([[1, 2], [3, 1]]))
        assert profile_curve(r, 0, r_max)[0] == 1.0

    def test_failed_everywhere(self):
        r, r_max = performance_ratios(table([[1, 5], [2, 5]], [[True, False], [True, False]]))
        taus = np.linspace(1.0, r_max, 50, endpoint=False)
        assert not np.any(profile_curve(r, 1, taus))

    def test_grid(self):
        tau = tau_grid(8.0)
        assert tau.size == GRID_POINTS and tau[0] == 1.0 and tau[-1] == pytest.approx(8.0)
        assert np.all(np.diff(np.log2(tau)) > 0)
        np.testing.assert_array_equal(tau_grid(1.0), [1.0])

    @settings(max_examples=50, deadline=None)
    @given(arrays(float, (6, 3), elements=st.floats(0.01, 100)), arrays(bool, (6, 3)))
    def test_monotone_nondecreasing(self, t, solved):
        p = build_profile(table(t, solved), points=64)
        assert np.all(np.diff(p.rho, axis=0) >= 0)
        assert np.all((p.rho >= 0) & (p.rho <= 1))


class TestRules:
    def test_ten_percent(self):
        np.testing.assert_array_equal(ten_percent_solved([[1.0, 1.05, 1.2]]), [[True, True, False]])

    def test_ten_percent_negative_best(self):
        np.testing.assert_array_equal(ten_percent_solved([[-10.0, -9.5, -8.0]]), [[True, True, False]])

    def test_bench_tables(self):
        rows = {("A", "x"): dict(f_min=0.0, f_star=0.0, evals=10, cpu_seconds=0.1),
                ("A", "y"): dict(f_min=0.2, f_star=0.0, evals=20, cpu_seconds=0.2),
                ("B", "x"): dict(f_min=2.1, f_star=2.0, evals=5, cpu_seconds=0.3),
                ("B", "y"): dict(f_min=2.0, f_star=2.0, evals=8, cpu_seconds=0.4)}
        t = bench_tables(rows)
        assert t["error"].metric[0, 0] == ERROR_FLOOR
        np.testing.assert_array_equal(t["error"].solved, [[True, False], [True, True]])
        np.testing.assert_array_equal(t["evals"].metric, [[10, 20], [5, 8]])

    def test_bench_tables_missing_cell(self):
        rows = {("A", "x"): dict(f_min=0.0, f_star=0.0, evals=1, cpu_seconds=0.1),
                ("B", "y"): dict(f_min=0.0, f_star=0.0, evals=1, cpu_seconds=0.1)}
        with pytest.raises(UsageError, match="missing result"):
            bench_tables(rows)

    def test_ct_tables(self):
        rows = {("S", "a"): dict(f_min=1.0, evals=3), ("S", "b"): dict(f_min=1.05, evals=4),
                ("T", "a"): dict(f_min=2.0, evals=3), ("T", "b"): dict(f_min=3.0, evals=1)}
        t = ct_tables(rows)
        np.testing.assert_array_equal(t["f_min"].solved, [[True, True], [True, False]])


class TestOutput:
    def test_csv_and_svg(self, tmp_path):
        p = build_profile(table([[1, 2], [3, 1]]), points=16)
        write_profile_csv(tmp_path / "p.csv", p)
        write_profile_svg(tmp_path / "p.svg", p, title="t")
        lines = (tmp_path / "p.csv").read_text().splitlines()
        assert lines[0] == "log2_tau,s0,s1"
        assert len(lines) == 17
        assert (tmp_path / "p.svg").read_text().startswith("<svg")

    def test_deterministic(self, tmp_path):
        p = build_profile(table([[1, 2], [3, 1]]))
        write_profile_csv(tmp_path / "a.csv", p)
        write_profile_csv(tmp_path / "b.csv", build_profile(table([[1, 2], [3, 1]])))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
