"""Matrix-free parallel-beam projector with exact ray/pixel intersection lengths.

The image occupies ``[-N/2, N/2]^2`` with unit pixels; row 0 is the top row.
A ray at angle ``theta`` and detector offset ``u`` passes through
``u (cos theta, sin theta)`` with direction ``(-sin theta, cos theta)``.
Rays are traversed Siddon-style: the parametric crossings with the vertical
and horizontal grid lines are merged in order, and every segment between two
consecutive crossings lies in exactly one pixel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from scsopt.core import UsageError

_PARALLEL_EPS = 1e-12


def default_detector_count(N: int) -> int:
    """Even detector count closest to ``sqrt(2) N`` (566 for N = 400, 90 for N = 64)."""
    return 2 * int(round(math.sqrt(2.0) * N / 2.0))


@dataclass(frozen=True)
class Geometry:
    N: int
    n_views: int
    n_det: int
    angles: np.ndarray = field(repr=False)
    det_spacing: float = 1.0

    @classmethod
    def parallel(cls, N: int, n_views: int, n_det: int | None = None,
                 det_spacing: float = 1.0) -> "Geometry":
        """Equally spaced views over [0, 180) degrees."""
        if N < 1 or n_views < 1:
            raise UsageError("need N >= 1 and n_views >= 1")
        n_det = default_detector_count(N) if n_det is None else int(n_det)
        if n_det < 1:
            raise UsageError("need at least one detector bin")
        angles = np.arange(n_views) * (np.pi / n_views)
        return cls(int(N), int(n_views), n_det, angles, float(det_spacing))

    @property
    def m(self) -> int:
        return self.n_views * self.n_det

    @property
    def n(self) -> int:
        return self.N * self.N


@numba.njit(cache=True)
def _ray_segments(N, cos_t, sin_t, u, idx, seg):
    """Fill ``idx``/``seg`` with pixel indices and chord lengths; return the count."""
    half = 0.5 * N
    px = u * cos_t
    py = u * sin_t
    rx = -sin_t
    ry = cos_t
    inf = np.inf

    if abs(rx) > _PARALLEL_EPS:
        t0 = (-half - px) / rx
        t1 = (half - px) / rx
        tx_lo = min(t0, t1)
        tx_hi = max(t0, t1)
    elif -half <= px <= half:
        tx_lo = -inf
        tx_hi = inf
    else:
        return 0
    if abs(ry) > _PARALLEL_EPS:
        t0 = (-half - py) / ry
        t1 = (half - py) / ry
        ty_lo = min(t0, t1)
        ty_hi = max(t0, t1)
    elif -half <= py <= half:
        ty_lo = -inf
        ty_hi = inf
    else:
        return 0

    t_enter = max(tx_lo, ty_lo)
    t_exit = min(tx_hi, ty_hi)
    if not t_exit > t_enter:
        return 0

    use_x = abs(rx) > _PARALLEL_EPS
    use_y = abs(ry) > _PARALLEL_EPS
    kx = 0
    sx = 1
    if use_x and rx < 0:
        kx = N
        sx = -1
    ky = 0
    sy = 1
    if use_y and ry < 0:
        ky = N
        sy = -1

    count = 0
    t_prev = t_enter
    while True:
        tx_next = inf
        if use_x:
            while 0 <= kx <= N:
                tx_next = (kx - half - px) / rx
                if tx_next > t_prev:
                    break
                kx += sx
                tx_next = inf
        ty_next = inf
        if use_y:
            while 0 <= ky <= N:
                ty_next = (ky - half - py) / ry
                if ty_next > t_prev:
                    break
                ky += sy
                ty_next = inf
        t_next = min(tx_next, ty_next, t_exit)
        if t_next > t_prev:
            mid = 0.5 * (t_prev + t_next)
            col = int(math.floor(px + mid * rx + half))
            row = int(math.floor(half - (py + mid * ry)))
            if col < 0:
                col = 0
            elif col >= N:
                col = N - 1
            if row < 0:
                row = 0
            elif row >= N:
                row = N - 1
            idx[count] = row * N + col
            seg[count] = t_next - t_prev
            count += 1
        if t_next >= t_exit:
            break
        t_prev = t_next
    return count


@numba.njit(cache=True)
def _forward(x, N, cos_a, sin_a, n_det, spacing):
    n_views = cos_a.shape[0]
    out = np.zeros(n_views * n_det)
    idx = np.empty(2 * N + 4, dtype=np.int64)
    seg = np.empty(2 * N + 4)
    centre = 0.5 * (n_det - 1)
    for v in range(n_views):
        for j in range(n_det):
            u = (j - centre) * spacing
            cnt = _ray_segments(N, cos_a[v], sin_a[v], u, idx, seg)
            acc = 0.0
            for q in range(cnt):
                acc += seg[q] * x[idx[q]]
            out[v * n_det + j] = acc
    return out


@numba.njit(cache=True)
def _back(r, N, cos_a, sin_a, n_det, spacing):
    n_views = cos_a.shape[0]
    out = np.zeros(N * N)
    idx = np.empty(2 * N + 4, dtype=np.int64)
    seg = np.empty(2 * N + 4)
    centre = 0.5 * (n_det - 1)
    for v in range(n_views):
        for j in range(n_det):
            u = (j - centre) * spacing
            cnt = _ray_segments(N, cos_a[v], sin_a[v], u, idx, seg)
            w = r[v * n_det + j]
            for q in range(cnt):
                out[idx[q]] += seg[q] * w
    return out


def forward_project(x, geom: Geometry) -> np.ndarray:
    """Line integrals of the pixel image along every ray, view-major."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if x.size != geom.n:
        raise UsageError(f"image has {x.size} pixels, geometry expects {geom.n}")
    return _forward(x, geom.N, np.cos(geom.angles), np.sin(geom.angles),
                    geom.n_det, geom.det_spacing)


def back_project(r, geom: Geometry) -> np.ndarray:
    """Exact adjoint of :func:`forward_project`."""
    r = np.ascontiguousarray(r, dtype=np.float64).ravel()
    if r.size != geom.m:
        raise UsageError(f"sinogram has {r.size} entries, geometry expects {geom.m}")
    return _back(r, geom.N, np.cos(geom.angles), np.sin(geom.angles),
                 geom.n_det, geom.det_spacing)
