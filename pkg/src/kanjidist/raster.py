"""Constant-width anti-aliased rasterization of component geometry.

Strokes render as constant-width lines; each cell stores the covered
area within that pixel (coverage in [0,1] times the pixel area), so
total mass approximates the inked area independently of resolution.
Coverage is measured on a deterministic 4x4 subpixel grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import svgpath

MIN_RESOLUTION = 8
SUBSAMPLE = 4


class RasterError(ValueError):
    pass


@dataclass
class PixelImage:
    n: int
    cells: np.ndarray  # (n, n), row = y, column = x, nonnegative masses

    @property
    def total(self) -> float:
        return float(self.cells.sum())

    def center_of(self, row: int, col: int) -> tuple[float, float]:
        return ((col + 0.5) / self.n, (row + 0.5) / self.n)

    def to_pgm(self) -> bytes:
        """P2 export with cell values scaled by 1e4 and rounded."""
        scaled = np.rint(self.cells * 1e4).astype(int)
        maxval = max(int(scaled.max()), 1)
        lines = [f"P2", f"{self.n} {self.n}", str(maxval)]
        lines += [" ".join(str(v) for v in row) for row in scaled]
        return ("\n".join(lines) + "\n").encode("ascii")

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "cells": [[float(v) for v in row] for row in self.cells]},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "PixelImage":
        obj = json.loads(text)
        return PixelImage(n=int(obj["n"]), cells=np.array(obj["cells"], dtype=float))


def rasterize(geometry: list[np.ndarray], n: int, width: float | None = None) -> PixelImage:
    """Render unit-canvas stroke geometry to an n x n coverage image.

    width is the full line width in canvas units; the default of 2/n
    keeps the inked area stable across resolutions.
    """
    if n < MIN_RESOLUTION:
        raise RasterError(f"resolution {n} too coarse; need at least {MIN_RESOLUTION}")
    if width is None:
        width = 2.0 / n
    m = n * SUBSAMPLE
    step = 1.0 / m
    centers = (np.arange(m) + 0.5) * step
    xs, ys = np.meshgrid(centers, centers)  # ys varies along rows
    px = xs.ravel()
    py = ys.ravel()
    covered = np.zeros(px.shape[0], dtype=bool)
    half = width / 2.0
    for path in geometry:
        pts = svgpath.flatten_path(path, tol=min(0.25 / n, 2e-3))
        a = pts[:-1]
        b = pts[1:]
        for (ax, ay), (bx, by) in zip(a, b):
            lo_x, hi_x = min(ax, bx) - half, max(ax, bx) + half
            lo_y, hi_y = min(ay, by) - half, max(ay, by) + half
            sel = np.flatnonzero(
                (px >= lo_x) & (px <= hi_x) & (py >= lo_y) & (py <= hi_y) & ~covered
            )
            if sel.size == 0:
                continue
            dx, dy = bx - ax, by - ay
            seg_len2 = dx * dx + dy * dy
            qx = px[sel] - ax
            qy = py[sel] - ay
            if seg_len2 < 1e-18:
                d2 = qx * qx + qy * qy
            else:
                t = np.clip((qx * dx + qy * dy) / seg_len2, 0.0, 1.0)
                ex = qx - t * dx
                ey = qy - t * dy
                d2 = ex * ex + ey * ey
            covered[sel[d2 <= half * half]] = True
    grid = covered.reshape(m, m).astype(float)
    coverage = grid.reshape(n, SUBSAMPLE, n, SUBSAMPLE).mean(axis=(1, 3))
    return PixelImage(n=n, cells=coverage / (n * n))


def raster_signature(image: PixelImage) -> bytes:
    """Stable content hash input for caching rasters and transport plans."""
    return image.cells.tobytes() + bytes([image.n % 256])
