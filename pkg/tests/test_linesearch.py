import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scsopt.core import CountingOracle, FunctionOracle, UsageError
from scsopt.linesearch import (
    FunctionMemory,
    NonmonotoneParams,
    WolfeParams,
    eta,
    nonmonotone_search,
    wolfe_search,
)


def square():
    return CountingOracle(FunctionOracle(1, lambda x: float(x[0] ** 2), lambda x: 2.0 * x))


def absolute():
    return CountingOracle(FunctionOracle(1, lambda x: float(abs(x[0])), lambda x: np.sign(x)))


def nm(oracle, x, d, memory_values, eta_k=0.0, **kw):
    x = np.asarray(x, float)
    d = np.asarray(d, float)
    params = NonmonotoneParams(memory=max(len(memory_values) - 1, 0), **kw)
    mem = FunctionMemory(params.memory)
    for v in memory_values:
        mem.push(v)
    g = oracle.subgradient(x)
    return nonmonotone_search(oracle, x, mem, g, d, eta_k, params)


class TestEta:
    def test_first_iteration(self):
        assert eta(1, 10.0) == 10.0

    def test_second_iteration(self):
        assert eta(2, 10.0) == pytest.approx(4.665164957684037, abs=1e-12)
        assert eta(2, 10.0) == pytest.approx(4.6651, abs=1e-4)

    def test_zero_slack(self):
        assert eta(1, 0.0) == 0.0

    def test_k_zero_rejected(self):
        with pytest.raises(UsageError):
            eta(0, 1.0)

    def test_summable_tail_decreasing(self):
        vals = [eta(k, 3.0) for k in range(1, 200)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestFunctionMemory:
    def test_keeps_last_m_plus_one(self):
        mem = FunctionMemory(2, 10.0)
        for v in (1.0, 2.0, 3.0):
            mem.push(v)
        assert mem.values() == [1.0, 2.0, 3.0]
        assert mem.max() == 3.0

    def test_memory_zero_is_monotone(self):
        mem = FunctionMemory(0, 5.0)
        mem.push(1.0)
        assert mem.max() == 1.0


class TestNonmonotone:
    def test_abs_full_step(self):
        out = nm(absolute(), [1.0], [-1.0], [1.0])
        assert out.accepted and out.alpha == 1.0 and out.f_new == 0.0

    def test_large_slack_accepts_first_trial(self):
        out = nm(square(), [1.0], [-100.0], [1.0], eta_k=1e9)
        assert out.alpha == 1.0 and out.evals_used == 1

    def test_backtracking_trace(self):
        # trace regenerated by brute force: 1, 0.5, 0.25, 0.125 rejected
        out = nm(square(), [1.0], [-3.0], [1.0], gamma=0.9)
        assert out.accepted
        assert out.alpha == 0.0625
        assert out.evals_used == 5
        assert out.x_new[0] == pytest.approx(0.8125, abs=1e-15)
        assert out.f_new == pytest.approx(0.66015625, abs=1e-15)

    def test_subgradient_requested_once(self):
        o = square()
        out = nm(o, [1.0], [-3.0], [1.0], gamma=0.9)
        assert o.function_evals == out.evals_used
        assert o.subgradient_evals == 2  # one at x_k (by the helper), one at the accepted point

    def test_failure_returns_best_trial(self):
        # ascent direction with no slack can never be accepted
        out = nm(square(), [1.0], [1.0], [1.0], min_step=1e-3)
        assert not out.accepted and out.g_new is None
        assert out.f_new > 1.0

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(0.0, 5.0),
           st.lists(st.floats(0.0, 50.0), min_size=1, max_size=7))
    def test_larger_memory_never_shrinks_step(self, x0, scale, slack, older):
        o = square()
        d = [-scale * 2.0 * x0]
        f0 = x0 * x0
        a0 = nm(o, [x0], d, [f0], eta_k=slack).alpha
        aM = nm(o, [x0], d, older + [f0], eta_k=slack).alpha
        assert aM >= a0

    def test_invalid_params(self):
        with pytest.raises(UsageError):
            NonmonotoneParams(gamma=1.5)
        with pytest.raises(UsageError):
            NonmonotoneParams(memory=-1)


class TestWolfe:
    def test_square_half_step(self):
        o = square()
        x = np.array([1.0])
        out = wolfe_search(o, x, 1.0, o.subgradient(x), np.array([-2.0]), WolfeParams())
        # alpha = 1 lands on x = -1 with f = 1 > 1 - 4e-4, so the first bisection point is taken
        assert out.accepted and out.alpha == 0.5 and out.x_new[0] == 0.0

    def test_newton_step_on_quadratic(self):
        Q = np.diag([1.0, 4.0])
        o = CountingOracle(FunctionOracle(2, lambda x: 0.5 * float(x @ Q @ x), lambda x: Q @ x))
        x = np.array([2.0, -1.0])
        g = o.subgradient(x)
        out = wolfe_search(o, x, o.value(x), g, -np.linalg.solve(Q, g), WolfeParams())
        assert out.alpha == 1.0 and out.evals_used == 1

    def test_abs_unit_step_uses_tie_rule(self):
        o = absolute()
        x = np.array([1.0])
        out = wolfe_search(o, x, 1.0, o.subgradient(x), np.array([-1.0]), WolfeParams())
        assert out.alpha == 1.0 and out.g_new[0] == 0.0

    def test_expands_on_long_valley(self):
        o = square()
        x = np.array([10.0])
        out = wolfe_search(o, x, 100.0, o.subgradient(x), np.array([-1.0]), WolfeParams(sigma=0.5))
        assert out.accepted and out.alpha > 1.0

    def test_budget_exhaustion(self):
        o = square()
        x = np.array([1.0])
        out = wolfe_search(o, x, 1.0, o.subgradient(x), np.array([1.0]), WolfeParams(max_evals=5))
        assert not out.accepted and out.evals_used == 5

    def test_invalid_params(self):
        with pytest.raises(UsageError):
            WolfeParams(gamma=0.9, sigma=0.5)
