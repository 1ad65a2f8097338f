"""Piecewise-constant test images with values in [0, 1]."""

from __future__ import annotations

import numpy as np

from scsopt.core import UsageError

# Toft's modified Shepp-Logan: intensity, semi-axes a, b, centre x0, y0, rotation (deg)
_SHEPP_LOGAN = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
)


def _check_size(N):
    if N < 16:
        raise UsageError("phantoms need N >= 16")


def _grid(N):
    # pixel centres on [-1, 1]^2, row 0 at the top
    c = (2.0 * np.arange(N) + 1.0) / N - 1.0
    X, Y = np.meshgrid(c, -c)
    return X, Y


def shepp_logan(N: int) -> np.ndarray:
    _check_size(N)
    X, Y = _grid(N)
    img = np.zeros((N, N))
    for rho, a, b, x0, y0, phi in _SHEPP_LOGAN:
        t = np.deg2rad(phi)
        xr = (X - x0) * np.cos(t) + (Y - y0) * np.sin(t)
        yr = -(X - x0) * np.sin(t) + (Y - y0) * np.cos(t)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += rho
    return np.clip(img, 0.0, 1.0)


def threephases_analog(N: int, seed: int = 0, n_disks: int = 40) -> np.ndarray:
    """Random overlapping disks at gray levels 1/3, 2/3 and 1 on a zero background."""
    _check_size(N)
    rng = np.random.default_rng(seed)
    X, Y = _grid(N)
    img = np.zeros((N, N))
    levels = np.array([1.0 / 3.0, 2.0 / 3.0, 1.0])
    for _ in range(n_disks):
        cx, cy = rng.uniform(-0.8, 0.8, size=2)
        r = rng.uniform(0.05, 0.25)
        img[(X - cx) ** 2 + (Y - cy) ** 2 <= r * r] = levels[rng.integers(3)]
    return img


def grains_analog(N: int, seed: int = 0, n_cells: int = 30) -> np.ndarray:
    """Voronoi tessellation with a random level from {0.2, ..., 1.0} per cell."""
    _check_size(N)
    rng = np.random.default_rng(seed)
    X, Y = _grid(N)
    sites = rng.uniform(-1.0, 1.0, size=(n_cells, 2))
    levels = rng.choice(np.array([0.2, 0.4, 0.6, 0.8, 1.0]), size=n_cells)
    d2 = (X[..., None] - sites[:, 0]) ** 2 + (Y[..., None] - sites[:, 1]) ** 2
    return levels[np.argmin(d2, axis=-1)]


PHANTOMS = {
    "shepplogan": lambda N, seed=0: shepp_logan(N),
    "threephases": threephases_analog,
    "grains": grains_analog,
}


def make_phantom(name: str, N: int, seed: int = 0) -> np.ndarray:
    try:
        fn = PHANTOMS[name]
    except KeyError:
        raise UsageError(f"unknown phantom {name!r}; choose from {sorted(PHANTOMS)}") from None
    return fn(N, seed)
