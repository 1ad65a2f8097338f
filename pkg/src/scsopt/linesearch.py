"""Step-length selection: nonmonotone backtracking and a weak Wolfe search."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from scsopt.core import CountingOracle, UsageError

MIN_STEP = 1e-16


@dataclass(frozen=True)
class NonmonotoneParams:
    memory: int = 7
    gamma: float = 1e-4
    eta0: float = 0.0
    backtrack: float = 0.5
    min_step: float = MIN_STEP

    def __post_init__(self):
        if self.memory < 0:
            raise UsageError("memory length must be >= 0")
        if not 0.0 < self.gamma < 1.0:
            raise UsageError("gamma must lie in (0, 1)")
        if not 0.0 < self.backtrack < 1.0:
            raise UsageError("backtracking factor must lie in (0, 1)")
        if self.eta0 < 0:
            raise UsageError("eta0 must be >= 0")


@dataclass(frozen=True)
class WolfeParams:
    gamma: float = 1e-4
    sigma: float = 0.9
    max_evals: int = 50

    def __post_init__(self):
        if not 0.0 < self.gamma < self.sigma < 1.0:
            raise UsageError("need 0 < gamma < sigma < 1")
        if self.max_evals < 1:
            raise UsageError("max_evals must be positive")


class FunctionMemory:
    """The most recent ``memory + 1`` accepted function values."""

    def __init__(self, memory: int, initial: float | None = None):
        self._values = deque(maxlen=memory + 1)
        if initial is not None:
            self._values.append(float(initial))

    def push(self, value: float):
        self._values.append(float(value))

    def max(self) -> float:
        return max(self._values)

    def __len__(self):
        return len(self._values)

    def values(self) -> list[float]:
        return list(self._values)


@dataclass
class LineSearchOutcome:
    alpha: float
    x_new: np.ndarray
    f_new: float
    g_new: np.ndarray | None
    evals_used: int
    accepted: bool


def eta(k: int, eta0: float) -> float:
    """Summable slack ``eta0 / k**1.1`` for iteration ``k >= 1``."""
    if k < 1:
        raise UsageError("eta is defined for k >= 1")
    return eta0 / k ** 1.1


def nonmonotone_search(oracle: CountingOracle, x_k, f_memory: FunctionMemory, g_k, d_k,
                       eta_k: float, params: NonmonotoneParams) -> LineSearchOutcome:
    """Backtrack from alpha = 1 until the nonmonotone sufficient-decrease test holds.

    The reference level is the max of the remembered function values plus
    ``eta_k``. Only function values are requested during backtracking; the
    subgradient is evaluated once at the accepted point. On failure the best
    trial point is returned with ``accepted=False`` and no subgradient.
    """
    slope = float(np.dot(g_k, d_k))
    ref = f_memory.max() + eta_k
    alpha = 1.0
    evals = 0
    best = None
    while alpha >= params.min_step:
        x_try = x_k + alpha * d_k
        f_try = oracle.value(x_try)
        evals += 1
        if f_try <= ref + params.gamma * alpha * slope:
            g_new = oracle.subgradient(x_try)
            return LineSearchOutcome(alpha, x_try, f_try, g_new, evals, True)
        if best is None or f_try < best[2]:
            best = (alpha, x_try, f_try)
        alpha *= params.backtrack
    a, x_b, f_b = best
    return LineSearchOutcome(a, x_b, f_b, None, evals, False)


def wolfe_search(oracle: CountingOracle, x_k, f_k: float, g_k, d_k,
                 params: WolfeParams) -> LineSearchOutcome:
    """Weak Wolfe step by doubling until bracketed, then bisection.

    The curvature test uses whatever subgradient the oracle returns at the
    trial point, which also makes the search usable on kinks.
    """
    slope = float(np.dot(g_k, d_k))
    lo, hi = 0.0, np.inf
    alpha = 1.0
    ev = None
    x_try = x_k
    for used in range(1, params.max_evals + 1):
        x_try = x_k + alpha * d_k
        ev = oracle.evaluate(x_try)
        if ev.value > f_k + params.gamma * alpha * slope:
            hi = alpha
        elif float(np.dot(ev.subgradient, d_k)) < params.sigma * slope:
            lo = alpha
        else:
            return LineSearchOutcome(alpha, x_try, ev.value, ev.subgradient, used, True)
        if used == params.max_evals:
            break
        alpha = 0.5 * (lo + hi) if np.isfinite(hi) else 2.0 * lo
    return LineSearchOutcome(alpha, x_try, ev.value, ev.subgradient, params.max_evals, False)
