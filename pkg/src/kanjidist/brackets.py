"""Distance brackets used to color neighbor listings and the explorer."""

from __future__ import annotations

from bisect import bisect_right

BRACKET_BOUNDS = (0.075, 0.1, 0.125, 0.15, 0.175, 0.2)
# darkest red for the closest bracket, fading to white beyond the last bound
BRACKET_COLORS = (
    "#EA4C3B",
    "#F0724B",
    "#F49265",
    "#F7AE83",
    "#F9C8A4",
    "#FADDC3",
    "#FFFFFF",
)


def bracket_of(distance: float) -> tuple[int, float, float, str]:
    """(index, lower, upper, color) of the bracket containing a distance.

    Index counts the bounds passed: 0 for [0, 0.075), up to 6 beyond 0.2.
    """
    idx = bisect_right(BRACKET_BOUNDS, distance)
    lo = BRACKET_BOUNDS[idx - 1] if idx > 0 else 0.0
    hi = BRACKET_BOUNDS[idx] if idx < len(BRACKET_BOUNDS) else float("inf")
    return idx, lo, hi, BRACKET_COLORS[idx]
