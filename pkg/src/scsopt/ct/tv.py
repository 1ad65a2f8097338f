"""Isotropic total variation over forward differences, and its subgradient."""

from __future__ import annotations

import numpy as np


def _as_image(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        N = int(round(np.sqrt(x.size)))
        x = x.reshape(N, N)
    return x


def _differences(img):
    # window covers rows/cols 0..N-2; each term looks right and down
    base = img[:-1, :-1]
    dx = img[:-1, 1:] - base
    dy = img[1:, :-1] - base
    return dx, dy


def tv_value(x) -> float:
    dx, dy = _differences(_as_image(x))
    return float(np.sum(np.sqrt(dx * dx + dy * dy)))


def tv_subgradient(x) -> np.ndarray:
    """Gradient of :func:`tv_value` with every zero-denominator term set to zero.

    Returned with the same shape as ``x``.
    """
    shape = np.shape(x)
    img = _as_image(x)
    dx, dy = _differences(img)
    mag = np.sqrt(dx * dx + dy * dy)
    w = np.zeros_like(mag)
    np.divide(1.0, mag, out=w, where=mag > 0.0)
    wx, wy = dx * w, dy * w
    g = np.zeros_like(img)
    g[:-1, :-1] -= wx + wy
    g[:-1, 1:] += wx
    g[1:, :-1] += wy
    return g.reshape(shape)
