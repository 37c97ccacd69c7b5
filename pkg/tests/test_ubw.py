import numpy as np
import pytest

from kanjidist.raster import PixelImage
from kanjidist.ubw import (
    UbwError,
    UbwParams,
    brute_oracle,
    relative_ubw,
    transport_lower_bound,
    ubw_distance,
)

P = UbwParams()


def img(n, entries):
    cells = np.zeros((n, n))
    for (r, c), m in entries:
        cells[r, c] = m
    return PixelImage(n, cells)


def random_pair(rng, n, density=0.4):
    a = rng.random((n, n)) * (rng.random((n, n)) < density)
    b = rng.random((n, n)) * (rng.random((n, n)) < density)
    return PixelImage(n, a), PixelImage(n, b)


def test_param_validation():
    with pytest.raises(UbwError):
        UbwParams(p=0.5)
    with pytest.raises(UbwError):
        UbwParams(b=0.0)
    with pytest.raises(UbwError):
        UbwParams(b=2.0)


def test_identity_zero_cost():
    a = img(8, [((2, 2), 0.5), ((5, 1), 0.7)])
    cost, plan = ubw_distance(a, a, P)
    assert cost == 0.0
    assert not plan.created and not plan.destroyed
    assert relative_ubw(a, a, P) == 0.0


def test_pure_deletion_costs_half_reach():
    a = img(8, [((3, 3), 1.0)])
    b = img(8, [])
    cost, plan = ubw_distance(a, b, P)
    assert abs(cost - 0.2) < 1e-12
    assert plan.destroyed == [((3, 3), 1.0)]
    assert abs(brute_oracle(a, b, P) - 0.2) < 1e-9


def test_two_point_masses_move_or_delete():
    for (r1, c1), (r2, c2) in [((0, 0), (0, 1)), ((0, 0), (3, 2)), ((0, 0), (7, 7))]:
        a = img(8, [((r1, c1), 1.0)])
        b = img(8, [((r2, c2), 1.0)])
        delta = np.hypot((r1 - r2) / 8, (c1 - c2) / 8)
        expected = min(delta, P.b)  # two candidates: move it or re-ink it
        cost, _ = ubw_distance(a, b, P)
        assert abs(cost - expected) < 1e-9
        assert abs(brute_oracle(a, b, P) - expected) < 1e-6


def test_relative_reaches_one_for_distant_equal_masses():
    a = img(8, [((0, 0), 0.7)])
    b = img(8, [((7, 7), 0.7)])
    assert abs(relative_ubw(a, b, P) - 1.0) < 1e-9


def test_errors():
    with pytest.raises(UbwError, match="mismatch"):
        ubw_distance(img(8, [((0, 0), 1.0)]), img(16, [((0, 0), 1.0)]), P)
    with pytest.raises(UbwError, match="empty"):
        ubw_distance(img(8, []), img(8, []), P)
    with pytest.raises(UbwError, match="oracle"):
        brute_oracle(img(16, [((0, 0), 1.0)]), img(16, [((1, 1), 1.0)]), P)


def test_oracle_agreement_random():
    rng = np.random.default_rng(42)
    for trial in range(30):
        n = (4, 6, 8)[trial % 3]
        a, b = random_pair(rng, n)
        if a.total == 0 and b.total == 0:
            continue
        cost, _ = ubw_distance(a, b, P)
        assert abs(cost - brute_oracle(a, b, P)) < 1e-6


def test_symmetry_and_plan_feasibility():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, b = random_pair(rng, 8)
        if a.total == 0 or b.total == 0:
            continue
        cab, plan = ubw_distance(a, b, P)
        cba, _ = ubw_distance(b, a, P)
        assert abs(cab - cba) < 1e-9
        rows, cols = {}, {}
        for src, dst, m in plan.entries:
            assert m >= 0
            rows[src] = rows.get(src, 0.0) + m
            cols[dst] = cols.get(dst, 0.0) + m
        for src, m in plan.destroyed:
            rows[src] = rows.get(src, 0.0) + m
        for dst, m in plan.created:
            cols[dst] = cols.get(dst, 0.0) + m
        for (r, c), s in rows.items():
            assert s <= a.cells[r, c] + 1e-9
        for (r, c), s in cols.items():
            assert s <= b.cells[r, c] + 1e-9
        assert plan.moved <= min(a.total, b.total) + 1e-9
        assert abs(plan.objective(P) - cab) < 1e-9


def test_no_transport_beyond_reach():
    rng = np.random.default_rng(2)
    for _ in range(5):
        a, b = random_pair(rng, 8, density=0.6)
        if a.total == 0 or b.total == 0:
            continue
        _, plan = ubw_distance(a, b, P)
        for (r, c), (r2, c2), m in plan.entries:
            assert np.hypot((r - r2) / 8, (c - c2) / 8) <= P.b + 1e-9


def test_triangle_inequality_of_absolute_distance():
    rng = np.random.default_rng(3)
    for _ in range(8):
        a, b = random_pair(rng, 6)
        c = PixelImage(6, rng.random((6, 6)) * (rng.random((6, 6)) < 0.4))
        if min(a.total, b.total, c.total) == 0:
            continue
        dab, _ = ubw_distance(a, b, P)
        dac, _ = ubw_distance(a, c, P)
        dcb, _ = ubw_distance(c, b, P)
        assert dab <= dac + dcb + 1e-9


def test_monotone_in_reach():
    rng = np.random.default_rng(4)
    for _ in range(5):
        a, b = random_pair(rng, 6)
        if a.total == 0 and b.total == 0:
            continue
        costs = [ubw_distance(a, b, UbwParams(b=bb))[0] for bb in (0.1, 0.25, 0.4, 0.8)]
        assert all(x <= y + 1e-12 for x, y in zip(costs, costs[1:]))


def test_mass_scaling():
    rng = np.random.default_rng(5)
    a, b = random_pair(rng, 8)
    lam = 3.7
    a2 = PixelImage(8, a.cells * lam)
    b2 = PixelImage(8, b.cells * lam)
    c1, _ = ubw_distance(a, b, P)
    c2, _ = ubw_distance(a2, b2, P)
    assert abs(c2 - lam * c1) < 1e-9
    assert abs(relative_ubw(a, b, P) - relative_ubw(a2, b2, P)) < 1e-12


def test_lower_bound_is_valid():
    rng = np.random.default_rng(6)
    for _ in range(20):
        a, b = random_pair(rng, 8)
        if a.total == 0 and b.total == 0:
            continue
        assert transport_lower_bound(a, b, P) <= relative_ubw(a, b, P) + 1e-9


def test_plan_json_skips_stationary_mass():
    a = img(8, [((2, 2), 1.0), ((4, 4), 1.0)])
    b = img(8, [((2, 2), 1.0), ((4, 5), 1.0)])
    _, plan = ubw_distance(a, b, P)
    text = plan.to_json()
    assert '"from": [4, 4]' in text
    assert '"from": [2, 2]' not in text
