"""The ten nonsmooth test problems and the accuracy measure used to score runs.

Every oracle is deterministic at kinks: among tied pieces of a max the first
one in natural order supplies the subgradient, and ``|t|`` contributes a zero
derivative at ``t = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from scsopt.core import UsageError

SOLVED_THRESHOLD = 1e-1


def _sign(t):
    # np.sign already maps 0 -> 0
    return np.sign(t)


class MaxQ:
    def __init__(self, n=20):
        self.n = n

    def value(self, x):
        return float(np.max(x * x))

    def subgradient(self, x):
        i = int(np.argmax(x * x))
        g = np.zeros(self.n)
        g[i] = 2.0 * x[i]
        return g


class MxHilb:
    def __init__(self, n=50):
        self.n = n
        idx = np.arange(1, n + 1)
        self.H = 1.0 / (idx[:, None] + idx[None, :] - 1.0)

    def value(self, x):
        return float(np.max(np.abs(self.H @ x)))

    def subgradient(self, x):
        r = self.H @ x
        i = int(np.argmax(np.abs(r)))
        return _sign(r[i]) * self.H[i]


class ChainedLQ:
    def __init__(self, n=2):
        self.n = n

    def value(self, x):
        a, b = x[:-1], x[1:]
        q = a * a + b * b - 1.0
        return float(np.sum(-a - b + np.maximum(q, 0.0)))

    def subgradient(self, x):
        a, b = x[:-1], x[1:]
        second = (a * a + b * b - 1.0) > 0.0
        g = np.zeros(self.n)
        g[:-1] += -1.0 + np.where(second, 2.0 * a, 0.0)
        g[1:] += -1.0 + np.where(second, 2.0 * b, 0.0)
        return g


def _cb3_pieces(x):
    a, b = x[:-1], x[1:]
    with np.errstate(over="ignore"):
        e = 2.0 * np.exp(-a + b)
    vals = np.stack([a ** 4 + b ** 2, (2.0 - a) ** 2 + (2.0 - b) ** 2, e])
    da = np.stack([4.0 * a ** 3, -2.0 * (2.0 - a), -e])
    db = np.stack([2.0 * b, -2.0 * (2.0 - b), e])
    return vals, da, db


class ChainedCB3I:
    def __init__(self, n=20):
        self.n = n

    def value(self, x):
        vals, _, _ = _cb3_pieces(x)
        return float(np.sum(np.max(vals, axis=0)))

    def subgradient(self, x):
        vals, da, db = _cb3_pieces(x)
        act = np.argmax(vals, axis=0)
        cols = np.arange(self.n - 1)
        g = np.zeros(self.n)
        g[:-1] += da[act, cols]
        g[1:] += db[act, cols]
        return g


class ChainedCB3II:
    def __init__(self, n=20):
        self.n = n

    def value(self, x):
        vals, _, _ = _cb3_pieces(x)
        return float(np.max(np.sum(vals, axis=1)))

    def subgradient(self, x):
        vals, da, db = _cb3_pieces(x)
        j = int(np.argmax(np.sum(vals, axis=1)))
        g = np.zeros(self.n)
        g[:-1] += da[j]
        g[1:] += db[j]
        return g


class ActiveFaces:
    def __init__(self, n=2):
        self.n = n

    def _args(self, x):
        return np.concatenate(([-np.sum(x)], x))

    def value(self, x):
        return float(np.max(np.log(np.abs(self._args(x)) + 1.0)))

    def subgradient(self, x):
        t = self._args(x)
        i = int(np.argmax(np.log(np.abs(t) + 1.0)))
        dt = _sign(t[i]) / (abs(t[i]) + 1.0)
        if i == 0:
            return -dt * np.ones(self.n)
        g = np.zeros(self.n)
        g[i - 1] = dt
        return g


class Brown2:
    def __init__(self, n=2):
        self.n = n

    def value(self, x):
        a, b = np.abs(x[:-1]), np.abs(x[1:])
        with np.errstate(over="ignore"):
            return float(np.sum(a ** (x[1:] ** 2 + 1.0) + b ** (x[:-1] ** 2 + 1.0)))

    def subgradient(self, x):
        u, v = x[:-1], x[1:]
        a, b = np.abs(u), np.abs(v)
        pa, pb = v * v + 1.0, u * u + 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            log_a = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), 0.0)
            log_b = np.where(b > 0, np.log(np.where(b > 0, b, 1.0)), 0.0)
            # d/du |u|^pa = pa |u|^(pa-1) sign(u); d/dv |u|^pa = |u|^pa ln|u| 2v
            du = pa * a ** (pa - 1.0) * _sign(u) + b ** pb * log_b * 2.0 * u
            dv = pb * b ** (pb - 1.0) * _sign(v) + a ** pa * log_a * 2.0 * v
        g = np.zeros(self.n)
        g[:-1] += du
        g[1:] += dv
        return g


class Mifflin2:
    def __init__(self, n=50):
        self.n = n

    def value(self, x):
        a, b = x[:-1], x[1:]
        q = a * a + b * b - 1.0
        return float(np.sum(-a + 2.0 * q + 1.75 * np.abs(q)))

    def subgradient(self, x):
        a, b = x[:-1], x[1:]
        q = a * a + b * b - 1.0
        w = 2.0 + 1.75 * _sign(q)
        g = np.zeros(self.n)
        g[:-1] += -1.0 + w * 2.0 * a
        g[1:] += w * 2.0 * b
        return g


def _crescent_pieces(x):
    a, b = x[:-1], x[1:]
    p1 = a * a + (b - 1.0) ** 2 + b - 1.0
    p2 = -a * a - (b - 1.0) ** 2 + b + 1.0
    d1 = (2.0 * a, 2.0 * (b - 1.0) + 1.0)
    d2 = (-2.0 * a, -2.0 * (b - 1.0) + 1.0)
    return p1, p2, d1, d2


class CrescentI:
    """Max of the two chained sums."""

    def __init__(self, n=2):
        self.n = n

    def value(self, x):
        p1, p2, _, _ = _crescent_pieces(x)
        return float(max(np.sum(p1), np.sum(p2)))

    def subgradient(self, x):
        p1, p2, d1, d2 = _crescent_pieces(x)
        da, db = d1 if np.sum(p1) >= np.sum(p2) else d2
        g = np.zeros(self.n)
        g[:-1] += da
        g[1:] += db
        return g


class CrescentII:
    """Sum over consecutive pairs of the pointwise max."""

    def __init__(self, n=2):
        self.n = n

    def value(self, x):
        p1, p2, _, _ = _crescent_pieces(x)
        return float(np.sum(np.maximum(p1, p2)))

    def subgradient(self, x):
        p1, p2, d1, d2 = _crescent_pieces(x)
        first = p1 >= p2
        g = np.zeros(self.n)
        g[:-1] += np.where(first, d1[0], d2[0])
        g[1:] += np.where(first, d1[1], d2[1])
        return g


def _alternating(n, odd, even):
    x = np.empty(n)
    x[0::2] = odd
    x[1::2] = even
    return x


def _maxq_start(n):
    i = np.arange(1, n + 1, dtype=np.float64)
    return np.where(i <= n // 2, i, -i)


@dataclass(frozen=True)
class BenchmarkProblem:
    name: str
    n: int
    x0: np.ndarray
    f_star: float
    oracle: object


_REGISTRY = {
    "MAXQ": (MaxQ, 20, 0.0, _maxq_start),
    "MXHILB": (MxHilb, 50, 0.0, lambda n: np.ones(n)),
    "ChainedLQ": (ChainedLQ, 2, None, lambda n: np.full(n, -0.5)),
    "ChainedCB3I": (ChainedCB3I, 20, None, lambda n: np.full(n, 2.0)),
    "ChainedCB3II": (ChainedCB3II, 20, None, lambda n: np.full(n, 2.0)),
    "Activefaces": (ActiveFaces, 2, 0.0, lambda n: np.ones(n)),
    "Brown2": (Brown2, 2, 0.0, lambda n: _alternating(n, -1.0, 1.0)),
    "Mifflin2": (Mifflin2, 50, -34.795, lambda n: np.full(n, -1.0)),
    "CrescentI": (CrescentI, 2, 0.0, lambda n: _alternating(n, -1.5, 2.0)),
    "CrescentII": (CrescentII, 2, 0.0, lambda n: _alternating(n, -1.5, 2.0)),
}

PROBLEM_NAMES = tuple(_REGISTRY)


def _f_star(name, n, table_value):
    if name == "ChainedLQ":
        return -(n - 1) * math.sqrt(2.0)
    if name in ("ChainedCB3I", "ChainedCB3II"):
        return 2.0 * (n - 1)
    return table_value


def make_problem(name: str) -> BenchmarkProblem:
    try:
        cls, n, table_value, start = _REGISTRY[name]
    except KeyError:
        raise UsageError(f"unknown benchmark problem {name!r}; choose from {PROBLEM_NAMES}") from None
    return BenchmarkProblem(name, n, start(n), _f_star(name, n, table_value), cls(n))


def error_measure(f_min: float, f_star: float) -> float:
    """Relative error to ``f_star``, or absolute error when ``f_star`` is zero."""
    if f_star != 0.0:
        return abs(f_min - f_star) / abs(f_star)
    return abs(f_min)


def is_solved(error: float) -> bool:
    return error < SOLVED_THRESHOLD
