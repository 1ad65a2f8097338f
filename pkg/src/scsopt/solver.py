"""Spectral conjugate subgradient (SCS) iteration and its building blocks."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from scsopt.core import CountingOracle, UsageError, _as_vector
from scsopt.linesearch import (
    MIN_STEP,
    FunctionMemory,
    LineSearchOutcome,
    NonmonotoneParams,
    WolfeParams,
    eta,
    nonmonotone_search,
    wolfe_search,
)


class BetaRule(enum.IntEnum):
    """Conjugacy parameter choices; ZERO gives the plain spectral subgradient method."""

    ZERO = 0
    PERRY = 1
    POLAK_RIBIERE = 2
    FLETCHER_REEVES = 3


class LineSearchKind(str, enum.Enum):
    NONMONOTONE = "nonmonotone"
    WOLFE = "wolfe"


@dataclass(frozen=True)
class ScsConfig:
    beta_rule: BetaRule = BetaRule.POLAK_RIBIERE
    line_search: LineSearchKind = LineSearchKind.NONMONOTONE
    memory: int = 7
    gamma: float = 1e-4
    sigma: float = 0.9
    theta_min: float = 1e-10
    theta_max: float = 1e10
    max_iter: int = 1000
    restart_tol: float = 1e-3
    # (mu_lo, nu_hi) band for the rescaled-direction variant; None disables it
    rescale: tuple[float, float] | None = None
    box_projection: bool = False
    grad_norm_stop: float = 0.0
    seed: int = 0
    backtrack: float = 0.5
    min_step: float = MIN_STEP
    wolfe_max_evals: int = 50

    def __post_init__(self):
        object.__setattr__(self, "beta_rule", BetaRule(self.beta_rule))
        object.__setattr__(self, "line_search", LineSearchKind(self.line_search))
        if not 0.0 < self.theta_min < self.theta_max < math.inf:
            raise UsageError("need 0 < theta_min < theta_max < inf")
        if self.max_iter < 0 or self.memory < 0:
            raise UsageError("max_iter and memory must be >= 0")
        if self.grad_norm_stop < 0:
            raise UsageError("grad_norm_stop must be >= 0")
        if self.rescale is not None:
            mu_lo, nu_hi = self.rescale
            if mu_lo < 0 or nu_hi <= 0:
                raise UsageError("rescale band needs mu_lo >= 0 and nu_hi > 0")
        # validates gamma/sigma ranges
        self.nonmonotone_params(0.0)
        if self.line_search is LineSearchKind.WOLFE:
            self.wolfe_params()

    @property
    def name(self) -> str:
        prefix = "NM" if self.line_search is LineSearchKind.NONMONOTONE else "W"
        return f"{prefix}B{int(self.beta_rule)}"

    def nonmonotone_params(self, eta0: float) -> NonmonotoneParams:
        return NonmonotoneParams(memory=self.memory, gamma=self.gamma, eta0=eta0,
                                 backtrack=self.backtrack, min_step=self.min_step)

    def wolfe_params(self) -> WolfeParams:
        return WolfeParams(gamma=self.gamma, sigma=self.sigma, max_evals=self.wolfe_max_evals)


def parse_solver_name(name: str) -> tuple[BetaRule, LineSearchKind]:
    """``"NMB2"`` -> (POLAK_RIBIERE, NONMONOTONE); ``"WB0"`` -> (ZERO, WOLFE)."""
    key = name.strip().upper()
    if key.startswith("NMB") and key[3:].isdigit():
        kind = LineSearchKind.NONMONOTONE
    elif key.startswith("WB") and key[2:].isdigit():
        kind = LineSearchKind.WOLFE
    else:
        raise UsageError(f"unknown solver id {name!r}")
    try:
        rule = BetaRule(int(key.lstrip("NMWB")))
    except ValueError:
        raise UsageError(f"unknown solver id {name!r}") from None
    return rule, kind


@dataclass(frozen=True)
class IterationRecord:
    k: int
    f: float
    alpha: float
    theta: float
    beta: float
    restarted: bool
    gnorm: float
    evals: int
    # reference level max_j f(x_{k-j}) used by the line search that produced x_k
    f_ref: float = math.nan
    dnorm: float = math.nan


@dataclass(frozen=True)
class SolveResult:
    f_min: float
    x_best: np.ndarray
    history: list[IterationRecord]
    function_evals: int
    subgradient_evals: int
    evals_at_best: int
    wall_time: float
    x_final: np.ndarray
    terminated_early: bool = False
    iterates: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def iterations(self) -> int:
        return self.history[-1].k


def spectral_theta(s, y, theta_min: float, theta_max: float, previous: float = 1.0) -> float:
    """Safeguarded Barzilai-Borwein scale ``s's / s'y``.

    Falls back to ``1/||s||`` (capped) when ``s'y <= 0`` and returns
    ``previous`` for a zero step.
    """
    s = np.asarray(s, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    snorm = float(np.linalg.norm(s))
    if snorm == 0.0:
        return previous
    sty = float(np.dot(s, y))
    if sty <= 0.0:
        return min(theta_max, 1.0 / snorm)
    return min(theta_max, max(theta_min, float(np.dot(s, s)) / sty))


def beta(rule: BetaRule, theta_k: float, theta_prev: float, alpha_k: float,
         s_k, y_k, g_k, g_next) -> float:
    rule = BetaRule(rule)
    if rule is BetaRule.ZERO:
        return 0.0
    if rule is BetaRule.PERRY:
        sty = float(np.dot(s_k, y_k))
        if sty == 0.0:
            return 0.0
        return float(np.dot(theta_k * y_k - s_k, g_next)) / sty
    gg = float(np.dot(g_k, g_k))
    if gg == 0.0:
        return 0.0
    denom = alpha_k * theta_prev * gg
    if rule is BetaRule.POLAK_RIBIERE:
        return theta_k * float(np.dot(y_k, g_next)) / denom
    return theta_k * float(np.dot(g_next, g_next)) / denom


def direction(theta_k: float, g_next, beta_k: float, s_k) -> np.ndarray:
    return -theta_k * np.asarray(g_next, dtype=np.float64) + beta_k * np.asarray(s_k, dtype=np.float64)


def restart_or_accept(d, g_next, theta_k: float, restart_tol: float = 1e-3):
    """Keep ``d`` if it is a sufficient descent direction, else fall back to ``-theta g``."""
    d = np.asarray(d, dtype=np.float64)
    g_next = np.asarray(g_next, dtype=np.float64)
    dnorm = np.linalg.norm(d)
    if dnorm > 0 and np.dot(d, g_next) <= -restart_tol * dnorm * np.linalg.norm(g_next):
        return d, False
    return -theta_k * g_next, True


def rescale_direction(d, g, mu_lo: float, nu_hi: float) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    dnorm = float(np.linalg.norm(d))
    if dnorm > nu_hi:
        return nu_hi * d / dnorm
    floor = mu_lo * float(np.linalg.norm(g))
    if dnorm < floor:
        return floor * d / dnorm
    return d


def box_project_point(x) -> np.ndarray:
    return np.minimum(np.maximum(np.asarray(x, dtype=np.float64), 0.0), 1.0)


def project_direction(x, d) -> np.ndarray:
    """Shorten ``d`` so that ``x + alpha d`` stays in the unit box for alpha in (0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise UsageError("point lies outside the unit box")
    return box_project_point(x + d) - x


def _next_direction(config: ScsConfig, theta_k, g_next, beta_k, s_k):
    d = direction(theta_k, g_next, beta_k, s_k)
    d, restarted = restart_or_accept(d, g_next, theta_k, config.restart_tol)
    if config.rescale is not None and not restarted:
        d = rescale_direction(d, g_next, *config.rescale)
    return d, restarted


def solve(oracle, x0, config: ScsConfig | None = None, *, keep_iterates: bool = False) -> SolveResult:
    """Minimize a nonsmooth function with Algorithm SCS.

    Runs ``config.max_iter`` iterations or stops once ``||g_k||`` drops to
    ``config.grad_norm_stop``. The best value seen over all iterates is
    reported together with the point attaining it.
    """
    config = config or ScsConfig()
    counting = oracle if isinstance(oracle, CountingOracle) else CountingOracle(oracle)
    x = _as_vector(x0, counting.n).copy()
    if config.box_projection and (np.any(x < 0.0) or np.any(x > 1.0)):
        raise UsageError("box-projected solve needs x0 inside [0, 1]^n")

    start = time.perf_counter()
    ev = counting.evaluate(x)
    f, g = ev.value, ev.subgradient
    gnorm = float(np.linalg.norm(g))
    eta0 = max(f, gnorm)
    nm_params = config.nonmonotone_params(eta0)
    memory = FunctionMemory(config.memory, f)

    theta = 1.0
    d = -g
    history = [IterationRecord(0, f, 0.0, theta, 0.0, False, gnorm, counting.function_evals,
                               dnorm=float(np.linalg.norm(d)))]
    iterates = [x.copy()] if keep_iterates else None
    f_best, x_best, evals_best = f, x.copy(), counting.function_evals
    failed = False

    for k in range(config.max_iter):
        if gnorm <= config.grad_norm_stop:
            break
        eta_k = eta0 if k == 0 else eta(k, eta0)
        f_ref = memory.max()
        outcome = _search(counting, config, nm_params, memory, x, f, g, d, eta_k)
        restarted = False
        if not outcome.accepted:
            outcome, restarted = _recover(counting, config, nm_params, memory, x, f, g, d,
                                          theta, eta_k)
            if outcome is None:
                failed = True
                break

        alpha = outcome.alpha
        x_new, f_new, g_new = outcome.x_new, outcome.f_new, outcome.g_new
        s = x_new - x
        y = g_new - g
        if not np.any(s):
            theta_k, beta_k = theta, 0.0
            d_new, restarted = -theta_k * g_new, True
        else:
            theta_k = spectral_theta(s, y, config.theta_min, config.theta_max, theta)
            beta_k = beta(config.beta_rule, theta_k, theta, alpha, s, y, g, g_new)
            d_new, r = _next_direction(config, theta_k, g_new, beta_k, s)
            restarted = restarted or r

        x, f, g, d, theta = x_new, f_new, g_new, d_new, theta_k
        if config.box_projection:
            x = box_project_point(x)  # guards rounding only; x is already in the box
        gnorm = float(np.linalg.norm(g))
        memory.push(f)
        history.append(IterationRecord(k + 1, f, alpha, theta_k, beta_k, restarted, gnorm,
                                       counting.function_evals, f_ref,
                                       float(np.linalg.norm(d))))
        if keep_iterates:
            iterates.append(x.copy())
        if f < f_best:
            f_best, x_best, evals_best = f, x.copy(), counting.function_evals

    return SolveResult(
        f_min=f_best,
        x_best=x_best,
        history=history,
        function_evals=counting.function_evals,
        subgradient_evals=counting.subgradient_evals,
        evals_at_best=evals_best,
        wall_time=time.perf_counter() - start,
        x_final=x,
        terminated_early=failed,
        iterates=iterates,
    )


def _search(counting, config, nm_params, memory, x, f, g, d, eta_k,
            min_step: float | None = None) -> LineSearchOutcome:
    if config.box_projection:
        d = project_direction(x, d)
    if config.line_search is LineSearchKind.WOLFE:
        return wolfe_search(counting, x, f, g, d, config.wolfe_params())
    params = nm_params
    if min_step is not None:
        params = NonmonotoneParams(params.memory, params.gamma, params.eta0, params.backtrack,
                                   min_step)
    return nonmonotone_search(counting, x, memory, g, d, eta_k, params)


def _recover(counting, config, nm_params, memory, x, f, g, d, theta, eta_k):
    """Retry a failed line search along ``-theta g``, then once with half the step floor."""
    d_restart = -theta * g
    if not np.array_equal(d_restart, d):
        outcome = _search(counting, config, nm_params, memory, x, f, g, d_restart, eta_k)
        if outcome.accepted:
            return outcome, True
    outcome = _search(counting, config, nm_params, memory, x, f, g, d_restart, eta_k,
                      min_step=0.5 * config.min_step)
    if outcome.accepted:
        return outcome, True
    return None, True
