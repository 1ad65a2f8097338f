"""Vector helpers and the objective-oracle abstraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np


class UsageError(ValueError):
    """Caller passed arguments that violate an operation's preconditions."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the operation."""


@dataclass(frozen=True)
class Evaluation:
    value: float
    subgradient: np.ndarray


class ObjectiveOracle(Protocol):
    """Anything that can return f(x) and one element of the subdifferential at x."""

    n: int

    def value(self, x: np.ndarray) -> float: ...

    def subgradient(self, x: np.ndarray) -> np.ndarray: ...


class FunctionOracle:
    """Wrap a pair of plain callables as an oracle."""

    def __init__(self, n: int, f: Callable[[np.ndarray], float],
                 g: Callable[[np.ndarray], np.ndarray]):
        self.n = int(n)
        self._f = f
        self._g = g

    def value(self, x):
        return float(self._f(x))

    def subgradient(self, x):
        return np.asarray(self._g(x), dtype=np.float64)


def _as_vector(x, n: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        x = x.ravel()
    if n is not None and x.size != n:
        raise UsageError(f"expected a vector of dimension {n}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("vector has non-finite components")
    return x


class CountingOracle:
    """Oracle wrapper that counts function and subgradient evaluations.

    ``value`` bumps ``function_evals``, ``subgradient`` bumps
    ``subgradient_evals`` and ``evaluate`` bumps both, once per call.
    """

    def __init__(self, inner: ObjectiveOracle):
        self.inner = inner
        self.n = inner.n
        self.function_evals = 0
        self.subgradient_evals = 0

    def value(self, x) -> float:
        x = _as_vector(x, self.n)
        self.function_evals += 1
        return float(self.inner.value(x))

    def subgradient(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        self.subgradient_evals += 1
        return np.asarray(self.inner.subgradient(x), dtype=np.float64)

    def evaluate(self, x) -> Evaluation:
        x = _as_vector(x, self.n)
        self.function_evals += 1
        self.subgradient_evals += 1
        return Evaluation(float(self.inner.value(x)),
                          np.asarray(self.inner.subgradient(x), dtype=np.float64))


def evaluate(oracle: CountingOracle, x) -> Evaluation:
    return oracle.evaluate(x)


def _check_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def dot(a, b) -> float:
    a, b = _check_pair(a, b)
    return float(np.dot(a.ravel(), b.ravel()))


def norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64).ravel()))


def axpy(alpha: float, a, b) -> np.ndarray:
    """Return ``alpha * a + b``."""
    a, b = _check_pair(a, b)
    return alpha * a + b
