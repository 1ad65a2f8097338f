"""Dolan-More performance profiles over a problems x solvers table."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from scsopt.benchmarks import error_measure, is_solved
from scsopt.core import UsageError

ERROR_FLOOR = 1e-16
FAILURE_MARGIN = 1.05
GRID_POINTS = 512
CT_TOLERANCE = 0.1


@dataclass
class ResultsTable:
    problems: list[str]
    solvers: list[str]
    metric: np.ndarray
    solved: np.ndarray

    def __post_init__(self):
        self.metric = np.asarray(self.metric, dtype=np.float64)
        self.solved = np.asarray(self.solved, dtype=bool)
        shape = (len(self.problems), len(self.solvers))
        if self.metric.shape != shape or self.solved.shape != shape:
            raise UsageError(f"table shape must be {shape}")
        if np.any(self.metric[self.solved] < 0):
            raise UsageError("performance metrics must be nonnegative")


@dataclass
class Profile:
    solvers: list[str]
    tau: np.ndarray
    rho: np.ndarray  # (len(tau), n_solvers)
    r_max: float


def performance_ratios(table: ResultsTable):
    """Return ``(ratios, r_M)``.

    Each solved entry is divided by the best solved entry of its problem;
    failures get ``r_M``. ``r_M`` is the largest finite ratio, pushed 5% further
    right when some entry failed (or is infinitely worse than a zero best) so
    those entries sit apart from every finite ratio.
    """
    t, ok = table.metric, table.solved
    if np.any(t < 0):
        raise UsageError("performance metrics must be nonnegative")
    r = np.full(t.shape, np.nan)
    for p in range(t.shape[0]):
        if not ok[p].any():
            continue
        row = t[p, ok[p]]
        best = row.min()
        if best > 0:
            r[p, ok[p]] = row / best
        else:
            # a zero best makes every positive entry infinitely worse
            r[p, ok[p]] = np.where(row > 0, np.inf, 1.0)
    finite = np.isfinite(r)
    r_max = float(r[finite].max()) if finite.any() else 1.0
    if not finite.all():
        r_max *= FAILURE_MARGIN
    r[~np.isfinite(r)] = r_max
    return r, r_max


def profile_curve(ratios, s: int, tau) -> np.ndarray:
    """Fraction of problems with ``r[p, s] <= tau`` for each ``tau``."""
    col = np.asarray(ratios)[:, s]
    tau = np.atleast_1d(np.asarray(tau, dtype=np.float64))
    return (col[None, :] <= tau[:, None]).sum(axis=1) / col.size


def tau_grid(r_max: float, points: int = GRID_POINTS) -> np.ndarray:
    if r_max <= 1.0:
        return np.ones(1)
    return np.geomspace(1.0, r_max, points)


def build_profile(table: ResultsTable, points: int = GRID_POINTS) -> Profile:
    r, r_max = performance_ratios(table)
    tau = tau_grid(r_max, points)
    rho = np.column_stack([profile_curve(r, s, tau) for s in range(len(table.solvers))])
    return Profile(list(table.solvers), tau, rho, r_max)


def bench_tables(rows) -> dict[str, ResultsTable]:
    """Tables for the error, evaluation-count and cpu metrics from benchmark rows.

    ``rows`` maps ``(problem, solver)`` to a dict with ``f_min``, ``f_star``,
    ``evals`` and ``cpu_seconds``.
    """
    problems, solvers = _axes(rows)
    err = np.empty((len(problems), len(solvers)))
    evals = np.empty_like(err)
    cpu = np.empty_like(err)
    solved = np.zeros(err.shape, dtype=bool)
    for i, p in enumerate(problems):
        for j, s in enumerate(solvers):
            row = _cell(rows, p, s)
            e = error_measure(row["f_min"], row["f_star"])
            err[i, j] = max(e, ERROR_FLOOR)
            evals[i, j] = row["evals"]
            cpu[i, j] = row["cpu_seconds"]
            solved[i, j] = is_solved(e)
    return {m: ResultsTable(problems, solvers, v, solved.copy())
            for m, v in (("error", err), ("evals", evals), ("cpu", cpu))}


def ten_percent_solved(f_min: np.ndarray, tol: float = CT_TOLERANCE) -> np.ndarray:
    """A solver solves a problem when its ``f_min`` is within ``tol`` of the row's best."""
    f_min = np.asarray(f_min, dtype=np.float64)
    best = f_min.min(axis=1, keepdims=True)
    return f_min <= best + tol * np.abs(best)


def ct_tables(rows) -> dict[str, ResultsTable]:
    problems, solvers = _axes(rows)
    f = np.array([[_cell(rows, p, s)["f_min"] for s in solvers] for p in problems])
    ev = np.array([[_cell(rows, p, s)["evals"] for s in solvers] for p in problems])
    solved = ten_percent_solved(f)
    return {"f_min": ResultsTable(problems, solvers, f, solved),
            "evals": ResultsTable(problems, solvers, ev, solved.copy())}


def _axes(rows):
    problems, solvers = [], []
    for p, s in rows:
        if p not in problems:
            problems.append(p)
        if s not in solvers:
            solvers.append(s)
    return problems, solvers


def _cell(rows, p, s):
    try:
        return rows[(p, s)]
    except KeyError:
        raise UsageError(f"missing result for problem {p!r}, solver {s!r}") from None


def write_profile_csv(path, profile: Profile) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["log2_tau", *profile.solvers])
        for t, row in zip(profile.tau, profile.rho):
            w.writerow([repr(float(np.log2(t))), *(repr(float(v)) for v in row)])


_COLOURS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def write_profile_svg(path, profile: Profile, title: str = "") -> None:
    """Static step-plot of every rho_s against log2(tau)."""
    W, H, pad = 640, 420, 50
    x = np.log2(profile.tau)
    x_hi = x[-1] if x[-1] > 0 else 1.0

    def px(v):
        return pad + (W - 2 * pad) * v / x_hi

    def py(v):
        return H - pad - (H - 2 * pad) * v

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>',
             f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>',
             f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle" font-size="12">log2(tau)</text>',
             f'<text x="14" y="{H / 2}" font-size="12" transform="rotate(-90 14 {H / 2})">rho(tau)</text>',
             f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    for k, s in enumerate(profile.solvers):
        pts = []
        prev = None
        for xi, yi in zip(x, profile.rho[:, k]):
            if prev is not None and yi != prev:
                pts.append(f"{px(xi):.2f},{py(prev):.2f}")
            pts.append(f"{px(xi):.2f},{py(yi):.2f}")
            prev = yi
        colour = _COLOURS[k % len(_COLOURS)]
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{" ".join(pts)}"/>')
        parts.append(f'<text x="{W - pad + 4}" y="{pad + 14 * k}" font-size="11" fill="{colour}">{s}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
