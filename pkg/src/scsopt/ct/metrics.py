"""Image fidelity scores against a ground-truth image."""

from __future__ import annotations

import math

import numpy as np

from scsopt.core import DomainError, UsageError


def _pair(x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise UsageError("images differ in size")
    return x, y


def psnr(x, y_true) -> float:
    """``10 log10(y_max / MSE)``.

    Note the peak enters linearly, not squared; for images with peak 1 the two
    conventions agree. Identical images give ``inf``.
    """
    x, y = _pair(x, y_true)
    y_max = float(np.max(y))
    if y_max <= 0.0:
        raise DomainError("PSNR needs a reference image with a positive maximum")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(y_max / mse)


def ssim(x, y, C1: float | None = None, C2: float | None = None) -> float:
    """Single-window SSIM computed from global means, variances and covariance."""
    x, y = _pair(x, y)
    y_max = float(np.max(np.abs(y)))
    if C1 is None:
        C1 = (0.01 * y_max) ** 2
    if C2 is None:
        C2 = (0.03 * y_max) ** 2
    mx, my = x.mean(), y.mean()
    vx, vy = x.var(), y.var()
    cov = float(np.mean((x - mx) * (y - my)))
    num = (2.0 * mx * my + C1) * (2.0 * cov + C2)
    den = (mx * mx + my * my + C1) * (vx + vy + C2)
    return float(num / den)
