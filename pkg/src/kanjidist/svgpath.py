"""Cubic Bezier path handling for kanjiVG stroke data.

A stroke path is stored as an array of cubic segments with shape
(n_segments, 4, 2): four control points per segment, in source
coordinates. Only the path commands found in kanjiVG files are
supported (M/m, C/c, S/s).
"""

from __future__ import annotations

import math
import re

import numpy as np

_NUMBER = re.compile(r"[-+]?(?:\d*\.\d+|\d+\.?)(?:[eE][-+]?\d+)?")
_COMMAND = re.compile(r"[A-Za-z]")


class PathError(ValueError):
    """Raised for malformed or unsupported path data."""


def parse_path(d: str) -> np.ndarray:
    """Parse an SVG path string into an array of cubic segments.

    Supports absolute/relative moveto, cubic curveto and smooth cubic
    curveto. Any other command raises PathError naming the command.
    The path must be a single connected subpath.
    """
    tokens = _tokenize(d)
    if not tokens or tokens[0][0] not in "Mm":
        raise PathError("path must start with a moveto command")
    segments: list[np.ndarray] = []
    current = np.zeros(2)
    prev_ctrl: np.ndarray | None = None
    started = False
    for cmd, numbers in tokens:
        rel = cmd.islower()
        op = cmd.upper()
        if op == "M":
            if started:
                raise PathError("disconnected subpath: interior moveto")
            if len(numbers) != 2:
                # kanjiVG movetos carry exactly one coordinate pair;
                # trailing pairs would be implicit linetos
                raise PathError("unsupported path command: implicit lineto after moveto")
            pt = np.array(numbers)
            current = current + pt if rel else pt
            started = True
        elif op == "C":
            if len(numbers) % 6 != 0 or not numbers:
                raise PathError("curveto needs multiples of 6 coordinates")
            for i in range(0, len(numbers), 6):
                pts = np.array(numbers[i : i + 6]).reshape(3, 2)
                if rel:
                    pts = pts + current
                seg = np.vstack([current[None, :], pts])
                segments.append(seg)
                prev_ctrl = seg[2]
                current = seg[3]
        elif op == "S":
            if len(numbers) % 4 != 0 or not numbers:
                raise PathError("smooth curveto needs multiples of 4 coordinates")
            for i in range(0, len(numbers), 4):
                pts = np.array(numbers[i : i + 4]).reshape(2, 2)
                if rel:
                    pts = pts + current
                c1 = 2 * current - prev_ctrl if prev_ctrl is not None else current
                seg = np.vstack([current[None, :], c1[None, :], pts])
                segments.append(seg)
                prev_ctrl = seg[2]
                current = seg[3]
        else:
            raise PathError(f"unsupported path command: {cmd}")
    if not segments:
        raise PathError("path contains no curve segments")
    return np.array(segments)


def _tokenize(d: str) -> list[tuple[str, list[float]]]:
    out = []
    pos = 0
    cmd = None
    for m in _COMMAND.finditer(d):
        if cmd is not None:
            out.append((cmd, [float(x) for x in _NUMBER.findall(d[pos : m.start()])]))
        cmd = m.group(0)
        pos = m.end()
    if cmd is not None:
        out.append((cmd, [float(x) for x in _NUMBER.findall(d[pos:])]))
    return out


def _split(seg: np.ndarray, t: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """De Casteljau split of one cubic segment at parameter t."""
    p0, p1, p2, p3 = seg
    q0 = p0 + t * (p1 - p0)
    q1 = p1 + t * (p2 - p1)
    q2 = p2 + t * (p3 - p2)
    r0 = q0 + t * (q1 - q0)
    r1 = q1 + t * (q2 - q1)
    s = r0 + t * (r1 - r0)
    return (np.array([p0, q0, r0, s]), np.array([s, r1, q2, p3]))


def _split_batch(s: np.ndarray) -> np.ndarray:
    """De Casteljau halving of a batch of segments; returns both halves."""
    p0, p1, p2, p3 = s[:, 0], s[:, 1], s[:, 2], s[:, 3]
    q0 = (p0 + p1) / 2
    q1 = (p1 + p2) / 2
    q2 = (p2 + p3) / 2
    r0 = (q0 + q1) / 2
    r1 = (q1 + q2) / 2
    m = (r0 + r1) / 2
    left = np.stack([p0, q0, r0, m], axis=1)
    right = np.stack([m, r1, q2, p3], axis=1)
    return np.concatenate([left, right])


def path_length(segments: np.ndarray, rel_tol: float = 1e-6) -> float:
    """Total arc length by adaptive subdivision, batched over segments.

    Uses the chord / control-polygon sandwich: both converge to the true
    length, so their gap bounds the error.
    """
    segs = np.asarray(segments, dtype=float).reshape(-1, 4, 2)
    total = 0.0
    while len(segs):
        hops = np.sqrt(((segs[:, 1:] - segs[:, :-1]) ** 2).sum(axis=2))
        poly = hops.sum(axis=1)
        chord = np.sqrt(((segs[:, 3] - segs[:, 0]) ** 2).sum(axis=1))
        done = (poly - chord) <= rel_tol * poly + 1e-15
        total += float(((2.0 * chord[done] + poly[done]) / 3.0).sum())
        rest = segs[~done]
        segs = _split_batch(rest) if len(rest) else rest
    return total


def segment_length(seg: np.ndarray, rel_tol: float = 1e-6) -> float:
    """Arc length of one cubic segment."""
    return path_length(np.asarray(seg, dtype=float)[None, :, :], rel_tol)


def flatten_segment(seg: np.ndarray, tol: float) -> np.ndarray:
    """Approximate one cubic by a polyline with max deviation below tol.

    Returns the polyline points including both endpoints.
    """
    pts = [seg[0]]
    stack = [seg]
    while stack:
        s = stack.pop()
        if _flat_enough(s, tol):
            pts.append(s[3])
        else:
            a, b = _split(s)
            stack.append(b)
            stack.append(a)
    return np.array(pts)


def _flat_enough(seg: np.ndarray, tol: float) -> bool:
    p0, p1, p2, p3 = seg
    d = p3 - p0
    n = math.hypot(d[0], d[1])
    if n < 1e-12:
        return (
            math.hypot(*(p1 - p0)) < tol
            and math.hypot(*(p2 - p0)) < tol
        )
    # distance of interior control points to the chord line
    d1 = abs(d[0] * (p1[1] - p0[1]) - d[1] * (p1[0] - p0[0])) / n
    d2 = abs(d[0] * (p2[1] - p0[1]) - d[1] * (p2[0] - p0[0])) / n
    return max(d1, d2) < tol


def flatten_path(segments: np.ndarray, tol: float = 1e-3) -> np.ndarray:
    """Polyline for a whole path, deduplicating the shared joints."""
    pts = [segments[0][0:1]]
    for seg in segments:
        pts.append(flatten_segment(seg, tol)[1:])
    return np.vstack(pts)


def segment_bbox(seg: np.ndarray) -> tuple[float, float, float, float]:
    """Tight (xmin, xmax, ymin, ymax) of a cubic via derivative roots."""
    p = seg
    mins = []
    maxs = []
    for axis in (0, 1):
        # B'(t)/3 = A t^2 + B t + C with the differences below
        d0 = float(p[1, axis] - p[0, axis])
        d1 = float(p[2, axis] - p[1, axis])
        d2 = float(p[3, axis] - p[2, axis])
        A = d0 - 2 * d1 + d2
        B = 2 * (d1 - d0)
        C = d0
        ts = [0.0, 1.0]
        if abs(A) < 1e-14:
            if abs(B) > 1e-14:
                t = -C / B
                if 0.0 < t < 1.0:
                    ts.append(t)
        else:
            disc = B * B - 4 * A * C
            if disc >= 0:
                r = math.sqrt(disc)
                for t in ((-B + r) / (2 * A), (-B - r) / (2 * A)):
                    if 0.0 < t < 1.0:
                        ts.append(t)
        vals = [_eval_axis(p, axis, t) for t in ts]
        mins.append(min(vals))
        maxs.append(max(vals))
    return (mins[0], maxs[0], mins[1], maxs[1])


def _eval_axis(p: np.ndarray, axis: int, t: float) -> float:
    u = 1.0 - t
    return float(
        u * u * u * p[0, axis]
        + 3 * u * u * t * p[1, axis]
        + 3 * u * t * t * p[2, axis]
        + t * t * t * p[3, axis]
    )


def path_bbox(segments: np.ndarray) -> tuple[float, float, float, float]:
    """Tight bounding box of a multi-segment path."""
    boxes = [segment_bbox(s) for s in segments]
    return (
        min(b[0] for b in boxes),
        max(b[1] for b in boxes),
        min(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def transform(segments: np.ndarray, scale: float, offset: np.ndarray) -> np.ndarray:
    """Apply uniform scale then translation to all control points."""
    return segments * scale + np.asarray(offset)
