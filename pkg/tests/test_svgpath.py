import numpy as np
import pytest

from kanjidist.svgpath import (
    PathError,
    flatten_path,
    parse_path,
    path_bbox,
    path_length,
    segment_length,
)


def line_segment(p0, p1):
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    return np.array([p0, p0 + (p1 - p0) / 3, p0 + 2 * (p1 - p0) / 3, p1])


def test_parse_minimal():
    segs = parse_path("M0,0 C1,1 2,2 3,3")
    assert segs.shape == (1, 4, 2)
    assert np.allclose(segs[0], [[0, 0], [1, 1], [2, 2], [3, 3]])


def test_parse_relative_and_chained():
    segs = parse_path("M10,10c1,0,2,0,3,0c0,1,0,2,0,3")
    assert segs.shape == (2, 4, 2)
    assert np.allclose(segs[0][3], [13, 10])
    assert np.allclose(segs[1][3], [13, 13])


def test_parse_smooth_reflection():
    segs = parse_path("M0,0 C1,0 2,0 3,0 S5,2 6,2")
    # first control of the smooth segment reflects the previous one
    assert np.allclose(segs[1][1], [4, 0])


def test_parse_errors():
    with pytest.raises(PathError, match="moveto"):
        parse_path("C1,1 2,2 3,3")
    with pytest.raises(PathError, match="L"):
        parse_path("M0,0 L5,5")
    with pytest.raises(PathError, match="Q"):
        parse_path("M0,0 Q1,1 2,2")
    with pytest.raises(PathError, match="disconnected"):
        parse_path("M0,0 C1,1 2,2 3,3 M5,5 C6,6 7,7 8,8")


def test_straight_length_pythagorean():
    seg = line_segment((0, 0), (0.3, 0.4))
    assert abs(segment_length(seg) - 0.5) < 1e-9


def test_degenerate_segment_zero_length():
    seg = np.zeros((4, 2)) + 0.25
    assert segment_length(seg) == 0.0


def test_reparametrized_straight_line():
    seg = np.array([[0, 0], [1 / 3, 0], [2 / 3, 0], [1, 0]], dtype=float)
    assert abs(segment_length(seg) - 1.0) < 1e-9


def test_curved_length_against_dense_sampling():
    seg = np.array([[0, 0], [0.4, 0.9], [0.8, -0.3], [1, 0.5]])
    ts = np.linspace(0, 1, 200_001)
    u = 1 - ts
    pts = (
        (u**3)[:, None] * seg[0]
        + (3 * u**2 * ts)[:, None] * seg[1]
        + (3 * u * ts**2)[:, None] * seg[2]
        + (ts**3)[:, None] * seg[3]
    )
    dense = np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1)).sum()
    got = segment_length(seg, rel_tol=1e-8)
    assert abs(got - dense) / dense < 1e-4


def test_bbox_exact_vs_sampling_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        segs = rng.random((3, 4, 2))
        x0, x1, y0, y1 = path_bbox(segs)
        ts = np.linspace(0, 1, 10_000)
        u = 1 - ts
        lo = np.array([np.inf, np.inf])
        hi = -lo
        for seg in segs:
            pts = (
                (u**3)[:, None] * seg[0]
                + (3 * u**2 * ts)[:, None] * seg[1]
                + (3 * u * ts**2)[:, None] * seg[2]
                + (ts**3)[:, None] * seg[3]
            )
            lo = np.minimum(lo, pts.min(axis=0))
            hi = np.maximum(hi, pts.max(axis=0))
        assert abs(x0 - lo[0]) < 1e-6 and abs(x1 - hi[0]) < 1e-6
        assert abs(y0 - lo[1]) < 1e-6 and abs(y1 - hi[1]) < 1e-6
        # exact box always contains the sampled one
        assert x0 <= lo[0] + 1e-12 and x1 >= hi[0] - 1e-12


def test_flatten_stays_close_to_curve():
    seg = np.array([[0, 0], [0.1, 1.5], [0.9, -1.0], [1, 0.2]])
    pts = flatten_path(seg[None], tol=1e-3)
    # every polyline vertex lies on the curve, so length converges from below
    assert abs(path_length(seg[None]) - np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(1)).sum()) < 5e-3


def test_length_invariances():
    rng = np.random.default_rng(11)
    segs = rng.random((4, 4, 2))
    base = path_length(segs)
    shifted = path_length(segs + np.array([3.7, -1.2]))
    scaled = path_length(segs * 2.5)
    assert abs(base - shifted) < 1e-6 * max(base, 1)
    assert abs(scaled - 2.5 * base) < 1e-6 * max(base, 1)
