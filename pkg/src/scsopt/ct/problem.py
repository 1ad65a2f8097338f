"""TV-regularized least-squares CT objective and scenario simulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scsopt.core import UsageError
from scsopt.ct.phantoms import make_phantom
from scsopt.ct.projector import Geometry, back_project, forward_project
from scsopt.ct.tv import tv_subgradient, tv_value


def add_gaussian_noise(b, level: float, seed: int = 0) -> np.ndarray:
    """Add white noise scaled so that ``||noise|| = level * ||b||`` exactly."""
    if level < 0:
        raise UsageError("noise level must be >= 0")
    b = np.asarray(b, dtype=np.float64)
    if level == 0.0:
        return b.copy()
    e = np.random.default_rng(seed).standard_normal(b.shape)
    return b + level * np.linalg.norm(b) * e / np.linalg.norm(e)


@dataclass(frozen=True)
class CtProblem:
    geometry: Geometry
    b: np.ndarray
    mu: float

    def __post_init__(self):
        if self.mu < 0:
            raise UsageError("regularization weight must be >= 0")
        if np.size(self.b) != self.geometry.m:
            raise UsageError("sinogram size does not match the geometry")


class CtObjective:
    """``f(x) = 0.5 ||Ax - b||^2 + mu TV(x)`` with a matching subgradient.

    The last residual is cached, so a subgradient request at the point just
    valued costs one back projection and no extra forward projection.
    """

    def __init__(self, problem: CtProblem):
        self.problem = problem
        self.n = problem.geometry.n
        self._x = None
        self._r = None

    def _residual(self, x):
        if self._x is None or not np.array_equal(self._x, x):
            self._r = forward_project(x, self.problem.geometry) - self.problem.b
            self._x = np.array(x, dtype=np.float64, copy=True)
        return self._r

    def value(self, x):
        r = self._residual(x)
        f = 0.5 * float(np.dot(r, r))
        if self.problem.mu:
            f += self.problem.mu * tv_value(x)
        return f

    def subgradient(self, x):
        g = back_project(self._residual(x), self.problem.geometry)
        if self.problem.mu:
            g += self.problem.mu * tv_subgradient(x).ravel()
        return g


def ct_objective(problem: CtProblem) -> CtObjective:
    return CtObjective(problem)


@dataclass(frozen=True)
class ScenarioSpec:
    """One reconstruction problem: phantom, acquisition mode and weight.

    ``mode`` is ``"low_dose"`` (noisy, ``n_views`` views) or ``"sparse_view"``
    (noise-free, few views).
    """

    phantom: str
    mode: str
    n_views: int
    noise: float
    mu: float
    N: int
    n_det: int | None = None
    seed: int = 0

    @property
    def label(self) -> str:
        if self.mode == "low_dose":
            tag = f"LD{int(round(self.noise * 100)):02d}"
        else:
            tag = f"SV{self.n_views}"
        return f"{tag}_{self.phantom}_mu{self.mu:g}"


def build_scenario(spec: ScenarioSpec):
    """Return ``(CtProblem, truth image as a flat vector)``."""
    if spec.mode not in ("low_dose", "sparse_view"):
        raise UsageError(f"unknown imaging mode {spec.mode!r}")
    truth = make_phantom(spec.phantom, spec.N, spec.seed).ravel()
    geom = Geometry.parallel(spec.N, spec.n_views, spec.n_det)
    b = forward_project(truth, geom)
    noise = spec.noise if spec.mode == "low_dose" else 0.0
    b = add_gaussian_noise(b, noise, spec.seed)
    return CtProblem(geom, b, spec.mu), truth
