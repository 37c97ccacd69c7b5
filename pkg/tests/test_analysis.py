import math

import numpy as np
import pytest

from kanjidist import analysis
from kanjidist.analysis import DistanceMatrix, focused_mds, knn, metric_mds, triangle_audit
from kanjidist.brackets import bracket_of


def matrix_from(points, codepoints=None):
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    values = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    cps = codepoints or list(range(0x4E00, 0x4E00 + n))
    return DistanceMatrix(codepoints=cps, values=values)


SET_CHARS = "粋枠酔酢砕顔"


@pytest.fixture(scope="module")
def small_matrix(engine):
    cps = [ord(c) for c in SET_CHARS]
    return analysis.distance_matrix(engine, cps)


def test_matrix_axioms(small_matrix):
    v = small_matrix.values
    assert np.allclose(v, v.T, atol=1e-9)
    assert np.allclose(np.diag(v), 0.0)
    assert v.max() <= 0.25 + 1e-12
    assert small_matrix.fingerprint


def test_matrix_permutation_equivariance(engine):
    cps = [ord(c) for c in SET_CHARS]
    a = analysis.distance_matrix(engine, cps)
    perm = list(reversed(cps))
    b = analysis.distance_matrix(engine, perm)
    for x in cps:
        for y in cps:
            assert abs(a.entry(x, y) - b.entry(x, y)) < 1e-12


def test_matrix_missing_codepoint(engine):
    with pytest.raises(KeyError):
        analysis.distance_matrix(engine, [ord("粋"), 0x4E8C])


def test_singleton_matrix(engine):
    m = analysis.distance_matrix(engine, [ord("粋")])
    assert m.values.shape == (1, 1) and m.values[0, 0] == 0.0


def test_matrix_workers_agree(engine):
    cps = [ord(c) for c in "粋枠酔"]
    a = analysis.distance_matrix(engine, cps, workers=1)
    b = analysis.distance_matrix(engine, cps, workers=2)
    assert np.allclose(a.values, b.values, atol=1e-12)


def test_matrix_export_round_trip(small_matrix):
    payload, sidecar = small_matrix.to_binary()
    again = DistanceMatrix.from_binary(payload, sidecar)
    assert again.codepoints == small_matrix.codepoints
    assert np.allclose(again.values, small_matrix.values)
    csv = small_matrix.to_csv()
    lines = csv.strip().split("\n")
    assert lines[0].split(",")[1:] == [f"{cp:05x}" for cp in small_matrix.codepoints]
    first_row = [float(v) for v in lines[1].split(",")[1:]]
    assert np.allclose(first_row, small_matrix.values[0])


def test_knn_ordering_and_exclusion(small_matrix):
    q = ord("粋")
    rows = knn(small_matrix, q, 3)
    assert len(rows) == 3
    assert all(cp != q for cp, _ in rows)
    dists = [d for _, d in rows]
    assert dists == sorted(dists)
    # full ranking equals an independent sort of the matrix row
    full = knn(small_matrix, q, len(SET_CHARS) - 1)
    qi = small_matrix.index_of(q)
    expected = sorted(
        (float(small_matrix.values[qi, j]), cp)
        for j, cp in enumerate(small_matrix.codepoints)
        if cp != q
    )
    assert [(cp, d) for d, cp in expected] == full


def test_knn_truncates_large_k(small_matrix):
    assert len(knn(small_matrix, ord("粋"), 100)) == len(SET_CHARS) - 1
    assert knn(small_matrix, ord("粋"), 0) == []


def test_knn_tie_break_by_codepoint():
    m = DistanceMatrix(codepoints=[10, 30, 20], values=np.array([
        [0.0, 0.1, 0.1],
        [0.1, 0.0, 0.2],
        [0.1, 0.2, 0.0],
    ]))
    rows = knn(m, 10, 2)
    assert rows == [(20, 0.1), (30, 0.1)]


def test_triangle_audit_metric_matrix_clean():
    rng = np.random.default_rng(0)
    m = matrix_from(rng.random((12, 3)))
    audit = triangle_audit(m)
    assert audit.triples_total == math.comb(12, 3)
    assert audit.triples_violating == 0


def test_triangle_audit_constructed_violation():
    values = np.array([[0.0, 0.3, 0.1], [0.3, 0.0, 0.1], [0.1, 0.1, 0.0]])
    audit = triangle_audit(DistanceMatrix(codepoints=[1, 2, 3], values=values))
    assert audit.triples_total == 1
    assert audit.triples_violating == 1
    assert audit.inequalities_violating == 1
    assert abs(audit.worst_gap - 0.1) < 1e-12


def test_focused_radii_exact_and_first_angle_zero(small_matrix):
    center = ord("粋")
    layout = focused_mds(small_matrix, center)
    ci = small_matrix.index_of(center)
    by_cp = {cp: (r, t) for cp, r, t in layout.points}
    for j, cp in enumerate(small_matrix.codepoints):
        if cp == center:
            continue
        r, theta = by_cp[cp]
        assert r == float(small_matrix.values[ci, j])  # bitwise, no stress on radii
        assert 0.0 <= theta < 2 * math.pi
    first = min((r, cp) for cp, r, t in layout.points)
    assert by_cp[first[1]][1] == 0.0


def test_focused_two_point_chord_law_of_cosines():
    # center X, two satellites at the same radius r with target chord t:
    # theta = arccos(1 - t^2 / (2 r^2)) up to reflection
    r, t = 0.1, 0.1
    values = np.array([[0.0, r, r], [r, 0.0, t], [r, t, 0.0]])
    layout = focused_mds(DistanceMatrix(codepoints=[1, 2, 3], values=values), 1)
    (cp_a, ra, ta), (cp_b, rb, tb) = layout.points
    chord = math.sqrt(ra * ra + rb * rb - 2 * ra * rb * math.cos(ta - tb))
    assert abs(chord - t) < 1e-5
    expected = math.acos(1 - t * t / (2 * r * r))
    assert min(abs(abs(ta - tb) - expected), abs(2 * math.pi - abs(ta - tb) - expected)) < 1e-5


def test_focused_equidistant_points_spread():
    n = 5
    values = np.full((n, n), 2.0)
    values[0, :] = values[:, 0] = 0.2
    np.fill_diagonal(values, 0.0)
    layout = focused_mds(DistanceMatrix(codepoints=list(range(n)), values=values), 0)
    angles = sorted(t for _, _, t in layout.points)
    for a, b in zip(angles, angles[1:]):
        assert b - a > 1e-3


def test_metric_mds_recovers_planar_configuration():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    m = matrix_from(pts)
    result = metric_mds(m)
    assert result.stress < 1e-6
    got = np.sqrt(((result.coords[:, None] - result.coords[None, :]) ** 2).sum(axis=2))
    assert np.allclose(got, m.values, atol=1e-4)


def test_metric_mds_stress_nonincreasing(small_matrix):
    result = metric_mds(small_matrix)
    trace = result.stress_trace
    assert all(a >= b - 1e-12 for a, b in zip(trace, trace[1:]))


def test_metric_mds_two_points_exact():
    values = np.array([[0.0, 0.37], [0.37, 0.0]])
    result = metric_mds(DistanceMatrix(codepoints=[1, 2], values=values))
    d = float(np.hypot(*(result.coords[0] - result.coords[1])))
    assert abs(d - 0.37) < 1e-9


def test_metric_mds_deterministic(small_matrix):
    a = metric_mds(small_matrix)
    b = metric_mds(small_matrix)
    assert np.array_equal(a.coords, b.coords)


def test_brackets():
    idx, lo, hi, color = bracket_of(0.13)
    assert idx == 3 and (lo, hi) == (0.125, 0.15)
    assert bracket_of(0.01)[0] == 0
    assert bracket_of(0.075)[0] == 1  # boundary opens the next bracket
    assert bracket_of(0.3)[0] == 6
    assert bracket_of(0.3)[3] == "#FFFFFF"
    assert bracket_of(0.0)[3] == "#EA4C3B"


def test_triangle_audit_clean_on_pure_transport_matrix():
    from kanjidist.raster import PixelImage
    from kanjidist.ubw import UbwParams, ubw_distance

    rng = np.random.default_rng(8)
    images = [
        PixelImage(6, rng.random((6, 6)) * (rng.random((6, 6)) < 0.5) + 1e-3)
        for _ in range(6)
    ]
    n = len(images)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = ubw_distance(images[i], images[j], UbwParams())[0]
    audit = triangle_audit(DistanceMatrix(codepoints=list(range(n)), values=values))
    assert audit.triples_violating == 0
