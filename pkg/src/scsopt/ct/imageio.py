"""Image and sinogram files: 16-bit binary PGM with a scaling sidecar, and CSV."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from scsopt.core import UsageError

_MAXVAL = 65535


def write_pgm(path, image) -> None:
    """Write a P5 16-bit PGM; the value range goes to ``<path>.txt``."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise UsageError("PGM output needs a 2-D image")
    lo, hi = float(img.min()), float(img.max())
    span = hi - lo
    scaled = np.zeros(img.shape) if span == 0 else (img - lo) / span
    data = np.round(scaled * _MAXVAL).astype(">u2")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{_MAXVAL}\n".encode("ascii"))
        fh.write(data.tobytes())
    Path(str(path) + ".txt").write_text(f"min {lo!r}\nmax {hi!r}\nmaxval {_MAXVAL}\n")


def read_pgm(path) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos].decode("ascii"))
    pos += 1
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != "P5":
        raise UsageError(f"{path} is not a binary PGM")
    dtype = ">u2" if maxval > 255 else "u1"
    data = np.frombuffer(raw[pos:], dtype=dtype, count=w * h).reshape(h, w) / maxval
    side = Path(str(path) + ".txt")
    if side.exists():
        meta = dict(line.split() for line in side.read_text().splitlines() if line.strip())
        lo, hi = float(meta["min"]), float(meta["max"])
        data = lo + data * (hi - lo)
    return data


def write_image_csv(path, image) -> None:
    np.savetxt(path, np.asarray(image, dtype=np.float64), delimiter=",", fmt="%.17g")


def read_image_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_sinogram_csv(path, b, n_views: int, n_det: int) -> None:
    b = np.asarray(b, dtype=np.float64).reshape(n_views, n_det)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["view", "det", "value"])
        for v in range(n_views):
            for j in range(n_det):
                w.writerow([v, j, repr(float(b[v, j]))])


def read_sinogram_csv(path) -> np.ndarray:
    """Return the sinogram as an ``(n_views, n_det)`` array."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"view", "det", "value"}:
        raise UsageError(f"{path}: expected header view,det,value")
    nv = 1 + max(int(r["view"]) for r in rows)
    nd = 1 + max(int(r["det"]) for r in rows)
    out = np.zeros((nv, nd))
    for r in rows:
        out[int(r["view"]), int(r["det"])] = float(r["value"])
    return out
