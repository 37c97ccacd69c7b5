"""Hierarchical component matching between two kanji.

Components of either kanji may be matched across all hierarchy levels,
but at most one match is allowed per vein (maximal root-to-bottom
inclusion chain) on each side. The kanji distance is the matched,
weighted sum of component distances plus a flat penalty rate on all
weight that stays unmatched; the minimizer is found exactly by a
branch-and-bound integer solver with a deterministic tie-break.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import BBox
from .kanjivg import KanjiDecomposition, index_and_veins
from .metric import RhoParams, labels_match, ot_argument_bound, registration_penalties, rho_from_terms
from .raster import PixelImage
from .ubw import relative_ubw, transport_lower_bound

logger = logging.getLogger(__name__)

HARD_VARIABLE_CAP = 10_000
_DFS_MAX_VARS = 16  # up to this size, exact search beats the LP machinery
_LEX_MAX_VARS = 48  # beyond this, exact lexicographic tie-break is skipped

MU_KINDS = ("min", "geometric", "harmonic", "arithmetic")


class MatchingError(ValueError):
    pass


@dataclass(frozen=True)
class WeightStructure:
    weights: dict  # (level, i) -> weight
    trickle: float

    def level_sum(self, level: int) -> float:
        return sum(w for (l, _i), w in self.weights.items() if l == level)


def component_weights(
    deco: KanjiDecomposition,
    trickle: float = 0.02,
    ink_of: Callable[[frozenset], float] | None = None,
) -> WeightStructure:
    """Ink-share weights per matchable component.

    Within each level the shares are normalized to sum to 1 (overlap
    between components inflates the raw shares otherwise), then each
    level below the first decays by (1 - trickle) per step.
    """
    from . import geometry

    if ink_of is None:
        lengths = {s.index: geometry.stroke_length(s) for s in deco.strokes}
        ink_of = lambda strokes: sum(lengths[i] for i in strokes)
    weights: dict = {}
    for l in range(0, deco.max_level + 1):
        inks = [ink_of(c.strokes) for c in deco.levels[l]]
        total = sum(inks)
        if total <= 0:
            raise MatchingError(f"level {l} has zero total ink")
        decay = (1.0 - trickle) ** max(0, l - 1)
        for i, ink in enumerate(inks):
            weights[(l, i + 1)] = ink / total * decay
    return WeightStructure(weights=weights, trickle=trickle)


def mu(kind: str, w1: float, w2: float) -> float:
    """Contribution weight of matching two components."""
    if kind == "min":
        return min(w1, w2)
    if kind == "geometric":
        return math.sqrt(w1 * w2)
    if kind == "harmonic":
        return 0.0 if w1 + w2 == 0 else 2.0 * w1 * w2 / (w1 + w2)
    if kind == "arithmetic":
        return (w1 + w2) / 2.0
    raise MatchingError(f"unknown mu kind {kind!r}")


@dataclass(frozen=True)
class MatchParams:
    a: float = 0.25  # penalty rate on unmatched weight; also the max distance
    mu_kind: str = "min"
    trickle: float = 0.02
    rho: RhoParams = field(default_factory=RhoParams)
    min_strokes: int = 0  # skip components below this size (0 = keep all)

    def __post_init__(self):
        if not (0 < self.a <= 1):
            raise MatchingError("penalty rate a must lie in (0, 1]")
        if self.mu_kind not in MU_KINDS:
            raise MatchingError(f"mu must be one of {MU_KINDS}")


@dataclass
class ComponentView:
    """Everything the matcher needs to know about one component."""

    key: tuple[int, int]
    label: str | None
    strokes: frozenset
    box: BBox
    ink: float
    raster: Callable[[], PixelImage]  # normalized rendering, lazy
    content_key: tuple = ()  # identity of (normalized geometry, label, box)

    def signature(self) -> tuple:
        corners = (
            round(self.box.xmin, 9),
            round(self.box.xmax, 9),
            round(self.box.ymin, 9),
            round(self.box.ymax, 9),
        )
        return (self.label, corners)


@dataclass
class PreparedKanji:
    codepoint: int
    deco: KanjiDecomposition
    indices: list[tuple[int, int]]
    veins: list[tuple[tuple[int, int], ...]]
    weights: WeightStructure
    comps: dict  # (level, i) -> ComponentView


@dataclass
class MatchedPair:
    source: tuple[int, int]
    target: tuple[int, int]
    mu_weight: float
    rho: float
    labels: tuple[str | None, str | None]


@dataclass
class MatchResult:
    pairs: list[MatchedPair]
    matched_weight: float
    unmatched_weight: float
    distance: float
    a: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "pairs": [
                    {
                        "from": list(p.source),
                        "to": list(p.target),
                        "mu_weight": p.mu_weight,
                        "rho": p.rho,
                        "labels": list(p.labels),
                    }
                    for p in self.pairs
                ],
                "unmatched_weight": self.unmatched_weight,
                "distance": self.distance,
            },
            sort_keys=True,
            ensure_ascii=False,
        )


def solve_binary_matching(
    costs: dict,
    weights: dict,
    veins1: list,
    veins2: list,
    a: float,
) -> list:
    """Exact minimizer of sum(cost * e) + a * max(0, 1 - sum(weight * e)).

    costs and weights map ((l,i), (l2,i2)) pairs to the weighted
    component distance and the pairing weight; each vein is an iterable
    of side-local component indices, and at most one incident pair may
    be chosen per vein. The unmatched-weight penalty saturates at zero,
    so overshooting a total weight of 1 (possible when components
    overlap) earns nothing. Returns the chosen pairs, lexicographically
    smallest among the optimal solutions (for instances small enough to
    canonicalize exactly).
    """
    pairs = sorted(costs)
    if not pairs:
        return []
    if len(pairs) > HARD_VARIABLE_CAP:
        raise MatchingError(f"matching program too large: {len(pairs)} variables")
    if len(pairs) <= _DFS_MAX_VARS:
        return _solve_small(pairs, costs, weights, veins1, veins2, a)

    from scipy.optimize import Bounds, LinearConstraint, milp

    m = len(pairs)
    # variables: e_0..e_{m-1} binary, then the unmatched-weight slack u
    c = np.array([costs[p] for p in pairs] + [a])
    rows = []
    for vein in veins1:
        members = set(vein)
        rows.append([1.0 if p[0] in members else 0.0 for p in pairs] + [0.0])
    for vein in veins2:
        members = set(vein)
        rows.append([1.0 if p[1] in members else 0.0 for p in pairs] + [0.0])
    constraints = []
    if rows:
        A = np.array(rows)
        constraints.append(LinearConstraint(A, -np.inf, np.ones(A.shape[0])))
    cover = np.array([weights[p] for p in pairs] + [1.0])
    constraints.append(LinearConstraint(cover[None, :], 1.0, np.inf))
    bounds = Bounds(0, 1)
    integrality = np.array([1] * m + [0])
    res = milp(c=c, constraints=constraints, integrality=integrality, bounds=bounds)
    if res.status != 0 or res.x is None:
        raise MatchingError(f"matching solver failed: {res.message}")
    best = float(c @ np.concatenate([np.round(res.x[:m]), res.x[m:]]))

    if m <= _LEX_MAX_VARS:
        # second stage: among optimal solutions, pick the
        # lexicographically smallest selection vector
        lex = np.array([2.0 ** (m - 1 - j) for j in range(m)] + [0.0])
        cons2 = constraints + [LinearConstraint(c[None, :], -np.inf, best + 1e-9)]
        res2 = milp(c=lex, constraints=cons2, integrality=integrality, bounds=bounds)
        if res2.status == 0 and res2.x is not None:
            res = res2

    chosen = [pairs[j] for j in np.flatnonzero(np.round(res.x[:m]) > 0.5)]
    return chosen


def _solve_small(pairs, costs, weights, veins1, veins2, a):
    """Exact depth-first search with an optimistic bound, for small programs.

    Matches the LP path's semantics exactly, including the preference for
    the lexicographically smallest selection vector among ties.
    """
    n = len(pairs)
    conflict = [0] * n
    for veins, side in ((veins1, 0), (veins2, 1)):
        for vein in veins:
            members = set(vein)
            incident = [j for j, p in enumerate(pairs) if p[side] in members]
            for j in incident:
                for k in incident:
                    if k != j:
                        conflict[j] |= 1 << k
    cost = [costs[p] for p in pairs]
    weight = [weights[p] for p in pairs]
    # the most a pair can ever improve the objective (slack fully active)
    gain = [max(0.0, a * w - c) for c, w in zip(cost, weight)]
    suffix = [0.0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1] + gain[j]

    best = {"val": a, "vec": (0,) * n}

    def dfs(j, blocked, cur_cost, cur_weight, vec):
        val_now = cur_cost + a * max(0.0, 1.0 - cur_weight)
        if j == n:
            if val_now < best["val"] - 1e-9 or (
                val_now < best["val"] + 1e-9 and tuple(vec) < best["vec"]
            ):
                best["val"] = min(val_now, best["val"])
                best["vec"] = tuple(vec)
            return
        if val_now - suffix[j] > best["val"] + 1e-9:
            return
        vec.append(0)
        dfs(j + 1, blocked, cur_cost, cur_weight, vec)
        vec.pop()
        if not (blocked >> j) & 1:
            vec.append(1)
            dfs(j + 1, blocked | conflict[j], cur_cost + cost[j], cur_weight + weight[j], vec)
            vec.pop()

    dfs(0, 0, 0.0, 0.0, [])
    return [pairs[j] for j in range(n) if best["vec"][j]]


def evaluate_pair(
    params: RhoParams, cv1: ComponentView, cv2: ComponentView, budget: float = math.inf
) -> tuple[float, tuple]:
    """Distance between two components, with early exits above budget.

    Returns (rho, (relative_transport, tau, sigma, chi)); the first slot
    is inf (and the transport term None) when a cheap bound already
    proves rho >= budget, so the exact transport solve is skipped.
    """
    tau, sigma, chi = registration_penalties(cv1.box, cv2.box)
    if params.label_override and labels_match(cv1.label, cv2.label):
        rel = 0.0
    else:
        threshold = ot_argument_bound(params, budget, tau, sigma, chi)
        if threshold <= 0.0:
            return math.inf, (None, tau, sigma, chi)
        ra, rb = cv1.raster(), cv2.raster()
        if threshold < math.inf and transport_lower_bound(ra, rb, params.ubw) >= threshold:
            return math.inf, (None, tau, sigma, chi)
        rel = relative_ubw(ra, rb, params.ubw)
    value = rho_from_terms(params, rel, tau, sigma, chi, cv1.label, cv2.label)
    return value, (rel, tau, sigma, chi)


def default_rho_evaluator(params: RhoParams) -> Callable:
    """Uncached component-distance evaluator (engines supply cached ones)."""

    def evaluate(cv1: ComponentView, cv2: ComponentView, budget: float = math.inf):
        return evaluate_pair(params, cv1, cv2, budget)

    return evaluate


def kanji_distance(
    k1: PreparedKanji,
    k2: PreparedKanji,
    params: MatchParams = MatchParams(),
    rho_fn: Callable | None = None,
) -> tuple[float, MatchResult]:
    """Exact minimizer of the vein-constrained matching objective."""
    if rho_fn is None:
        rho_fn = default_rho_evaluator(params.rho)

    def keep(pk: PreparedKanji, key) -> bool:
        if params.min_strokes <= 0 or key[0] == 0:
            return True
        return len(pk.comps[key].strokes) >= params.min_strokes

    costs = {}
    weights = {}
    for i1 in k1.indices:
        if not keep(k1, i1):
            continue
        w1 = k1.weights.weights[i1]
        cv1 = k1.comps[i1]
        for i2 in k2.indices:
            if not keep(k2, i2):
                continue
            w2 = k2.weights.weights[i2]
            weight = mu(params.mu_kind, w1, w2)
            if weight <= 0:
                continue
            value, terms = rho_fn(cv1, k2.comps[i2], params.a)
            if value >= params.a:  # can never beat leaving the weight unmatched
                continue
            costs[(i1, i2)] = weight * value
            weights[(i1, i2)] = weight

    chosen = solve_binary_matching(
        costs,
        weights,
        [tuple(v) for v in k1.veins],
        [tuple(v) for v in k2.veins],
        params.a,
    )
    pairs = []
    matched = 0.0
    cost = 0.0
    for key in chosen:
        weight = weights[key]
        value = costs[key] / weight
        matched += weight
        cost += costs[key]
        pairs.append(
            MatchedPair(
                source=key[0],
                target=key[1],
                mu_weight=weight,
                rho=value,
                labels=(k1.comps[key[0]].label, k2.comps[key[1]].label),
            )
        )
    distance = cost + params.a * max(1.0 - matched, 0.0)
    distance = min(distance, params.a)
    result = MatchResult(
        pairs=sorted(pairs, key=lambda p: (p.source, p.target)),
        matched_weight=matched,
        unmatched_weight=1.0 - matched,
        distance=distance,
        a=params.a,
    )
    return distance, result
