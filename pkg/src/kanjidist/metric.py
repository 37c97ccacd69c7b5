"""Component distance: registration penalties and their weighted blend.

Two components are compared by the relative unbalanced ink transport
between their normalized drawings plus penalties for the translation,
scaling and distortion removed by the normalization. Each term passes
through an increasing [0,1] -> [0,1] transform before weighting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BBox, box_descriptors
from .ubw import UbwParams


@dataclass(frozen=True)
class PsiParams:
    """Logit-logistic transform with psi(x0) = 1/2 and shape alpha.

    alpha = 1, x0 = 0.5 is the identity; alpha -> infinity approaches a
    step at 1/2.
    """

    alpha: float = 1.0
    x0: float = 0.5

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if not (0 < self.x0 < 1):
            raise ValueError("x0 must lie in (0, 1)")

    @property
    def is_identity(self) -> bool:
        return self.alpha == 1.0 and self.x0 == 0.5


IDENTITY = PsiParams(1.0, 0.5)


def psi(params: PsiParams, x: float) -> float:
    """Evaluate the transform; endpoints are defined by their limits."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    q = (params.x0 / (1.0 - params.x0)) * ((1.0 - x) / x)
    return 1.0 / (1.0 + q**params.alpha)


def psi_inverse(params: PsiParams, y: float) -> float:
    """Pre-image of y under the transform."""
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    q = (1.0 / y - 1.0) ** (1.0 / params.alpha)
    r = q * (1.0 - params.x0) / params.x0
    return 1.0 / (1.0 + r)


def registration_penalties(box_a: BBox, box_b: BBox) -> tuple[float, float, float]:
    """(translation, log-scale, log-distortion) penalties of two boxes.

    All three are clamped to [0,1] so they stay inside the transforms'
    domain; the raw center distance can reach sqrt(2) and the log ratios
    are unbounded.
    """
    (ax, ay), (bx, by) = box_a.center, box_b.center
    tau = math.hypot(ax - bx, ay - by)
    scale_a, dist_a = box_descriptors(box_a)
    scale_b, dist_b = box_descriptors(box_b)
    sigma = abs(math.log(scale_a / scale_b))
    chi = abs(math.log(dist_a / dist_b))
    clamp = lambda v: min(max(v, 0.0), 1.0)
    return clamp(tau), clamp(sigma), clamp(chi)


@dataclass(frozen=True)
class RhoParams:
    """Weights and transforms of the combined component distance.

    ot_scale rescales the relative transport distance before the first
    transform; 2.0 normalizes by half the worst case, i.e. by the
    deletion cost of the heavier image rather than by reach times mass.
    """

    lambdas: tuple[float, float, float, float] = (0.8, 0.1, 0.05, 0.05)
    psis: tuple[PsiParams, PsiParams, PsiParams, PsiParams] = (
        PsiParams(2.0, 0.4),
        IDENTITY,
        IDENTITY,
        IDENTITY,
    )
    ubw: UbwParams = field(default_factory=UbwParams)
    label_override: bool = True
    ot_scale: float = 2.0

    def __post_init__(self):
        if any(l < 0 for l in self.lambdas):
            raise ValueError("lambda weights must be nonnegative")
        if abs(sum(self.lambdas) - 1.0) > 1e-12:
            raise ValueError("lambda weights must sum to 1")
        if self.ot_scale <= 0:
            raise ValueError("ot_scale must be positive")


def labels_match(label_a: str | None, label_b: str | None) -> bool:
    """True only when both labels are present and byte-equal."""
    return label_a is not None and label_b is not None and label_a == label_b


def rho_from_terms(
    params: RhoParams,
    relative_transport: float,
    tau: float,
    sigma: float,
    chi: float,
    label_a: str | None = None,
    label_b: str | None = None,
) -> float:
    """Blend precomputed terms into the component distance.

    With label_override, matching labels force the transport term's
    argument to zero regardless of its value. The rescaled transport
    argument is capped at 1 to stay in the transforms' domain.
    """
    ot_arg = min(relative_transport * params.ot_scale, 1.0)
    if params.label_override and labels_match(label_a, label_b):
        ot_arg = 0.0
    l0, l1, l2, l3 = params.lambdas
    p0, p1, p2, p3 = params.psis
    return (
        l0 * psi(p0, ot_arg)
        + l1 * psi(p1, tau)
        + l2 * psi(p2, sigma)
        + l3 * psi(p3, chi)
    )


def ot_argument_bound(params: RhoParams, budget: float, tau: float, sigma: float, chi: float) -> float:
    """Smallest relative transport at which the distance reaches the budget.

    Used to skip exact transport solves: once a cheap lower bound on the
    relative transport exceeds this threshold, the pair's distance is at
    least the budget no matter the exact value. Returns inf when the
    budget is unreachable through the transport term.
    """
    l0, l1, l2, l3 = params.lambdas
    p0, p1, p2, p3 = params.psis
    rest = l1 * psi(p1, tau) + l2 * psi(p2, sigma) + l3 * psi(p3, chi)
    if l0 <= 0:
        return math.inf
    needed = (budget - rest) / l0
    if needed <= 0:
        return 0.0
    if needed > 1:
        return math.inf
    return psi_inverse(p0, needed) / params.ot_scale
