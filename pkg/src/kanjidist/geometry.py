"""Component geometry on the unit canvas: lengths, boxes, normalization.

kanjiVG source coordinates (109x109) are mapped to the unit square by
dividing by 109 before anything else happens. A component's geometry is
the list of its strokes' cubic-segment arrays in unit coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import svgpath
from .kanjivg import SOURCE_SIZE, Component, KanjiDecomposition, Stroke

# one source-grid unit; floors degenerate box sides before ratios
MIN_SIDE = 1.0 / SOURCE_SIZE


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BBox:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def center(self) -> tuple[float, float]:
        return ((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)

    def union(self, other: "BBox") -> "BBox":
        return BBox(
            min(self.xmin, other.xmin),
            max(self.xmax, other.xmax),
            min(self.ymin, other.ymin),
            max(self.ymax, other.ymax),
        )


@dataclass(frozen=True)
class NormalizationRecord:
    center: tuple[float, float]  # original box center
    scale: float  # factor applied around the center


def unit_geometry(deco: KanjiDecomposition, comp: Component) -> list[np.ndarray]:
    """Stroke segment arrays of a component, scaled to the unit canvas."""
    return [deco.stroke_by_index(i).path / SOURCE_SIZE for i in comp.sorted_strokes()]


def stroke_length(stroke, rel_tol: float = 1e-6) -> float:
    """Arc length of a stroke in unit-canvas units.

    Accepts a Stroke (source coordinates) or a bare segment array that
    is already on the unit canvas.
    """
    if isinstance(stroke, Stroke):
        return svgpath.path_length(stroke.path, rel_tol) / SOURCE_SIZE
    return svgpath.path_length(np.asarray(stroke, dtype=float), rel_tol)


def component_ink(geometry: list[np.ndarray]) -> float:
    """Total stroke length of a component on the unit canvas."""
    return float(sum(svgpath.path_length(p) for p in geometry))


def bounding_box(geometry: list[np.ndarray]) -> BBox:
    """Tight box over all strokes, curve extrema included."""
    if not geometry:
        raise GeometryError("empty component has no bounding box")
    box = None
    for path in geometry:
        x0, x1, y0, y1 = svgpath.path_bbox(path)
        b = BBox(x0, x1, y0, y1)
        box = b if box is None else box.union(b)
    return box


def normalize_component(
    geometry: list[np.ndarray], margin: float = 0.98
) -> tuple[list[np.ndarray], NormalizationRecord]:
    """Center a component at (1/2, 1/2) and scale its longer box side to margin.

    Aspect ratio is preserved. A component with no extent in either axis
    is centered but left unscaled.
    """
    box = bounding_box(geometry)
    extent = max(box.width, box.height)
    scale = margin / extent if extent > 1e-12 else 1.0
    cx, cy = box.center
    offset = np.array([0.5 - scale * cx, 0.5 - scale * cy])
    out = [svgpath.transform(p, scale, offset) for p in geometry]
    return out, NormalizationRecord(center=(cx, cy), scale=scale)


def box_descriptors(box: BBox) -> tuple[float, float]:
    """(scale, distortion) of a box: geometric-mean side and side ratio.

    Zero-extent sides are floored at one source-grid unit so that single
    horizontal or vertical strokes keep finite descriptors.
    """
    w = max(box.width, MIN_SIDE)
    h = max(box.height, MIN_SIDE)
    return float(np.sqrt(w * h)), float(w / h)
