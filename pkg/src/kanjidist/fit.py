"""Fitting the component-distance parameters to similarity judgments.

The transform parameters come from ordinary least squares on the double
logit scale; the term weights from simplex-constrained least squares;
and a transformed kernel-regression estimator covers the nonparametric
route.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .metric import PsiParams

logger = logging.getLogger(__name__)

RESPONSE_CLAMP = 1e-4  # raters return hard 0/1 endpoints; keep logits finite


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class JudgmentRecord:
    ubw: float
    tau: float
    sigma: float
    chi: float
    y: float
    extras: tuple = ()

    def features(self) -> tuple:
        return (self.ubw, self.tau, self.sigma, self.chi) + self.extras


def read_judgments(text: str) -> list[JudgmentRecord]:
    """Parse training CSV with columns ubw, tau, sigma, chi, y (+ extras)."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise FitError("no judgment records in input")
    base = ("ubw", "tau", "sigma", "chi", "y")
    extras = [c for c in rows[0] if c not in base]
    out = []
    for row in rows:
        out.append(
            JudgmentRecord(
                ubw=float(row["ubw"]),
                tau=float(row["tau"]),
                sigma=float(row["sigma"]),
                chi=float(row["chi"]),
                y=float(row["y"]),
                extras=tuple(float(row[c]) for c in extras),
            )
        )
    return out


def _clamp01(v: np.ndarray) -> np.ndarray:
    return np.clip(v, RESPONSE_CLAMP, 1.0 - RESPONSE_CLAMP)


def _logit(v: np.ndarray) -> np.ndarray:
    return np.log(v / (1.0 - v))


def fit_psi(pairs) -> PsiParams:
    """Recover transform parameters from (input, response) pairs.

    On the double logit scale the transform is linear: the slope is the
    shape parameter and the intercept encodes the midpoint. The shape is
    floored at 1.
    """
    data = np.asarray(list(pairs), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 3:
        raise FitError("need at least 3 (x, y) pairs")
    x = _clamp01(data[:, 0])
    y = _clamp01(data[:, 1])
    lx = _logit(x)
    ly = _logit(y)
    if np.ptp(lx) < 1e-12:
        raise FitError("degenerate design: all inputs equal")
    slope, intercept = np.polyfit(lx, ly, 1)
    if slope < 1e-9:
        raise FitError("degenerate responses: fitted slope is not positive")
    x0 = 1.0 / (1.0 + math.exp(intercept / slope))
    return PsiParams(alpha=max(float(slope), 1.0), x0=float(x0))


def fit_lambdas(
    records: list[JudgmentRecord],
    psis: tuple[PsiParams, PsiParams, PsiParams, PsiParams],
    max_iter: int = 100_000,
    tol: float = 1e-8,
) -> tuple[float, float, float, float]:
    """Simplex-constrained least squares of responses on transformed terms.

    Solved by projected gradient descent; the result always lies on the
    simplex (nonnegative, summing to 1).
    """
    from .metric import psi as psi_eval

    if len(records) < 4:
        raise FitError("need at least 4 records")
    design = np.array(
        [
            [psi_eval(p, v) for p, v in zip(psis, (r.ubw, r.tau, r.sigma, r.chi))]
            for r in records
        ]
    )
    y = np.array([r.y for r in records])
    if np.linalg.matrix_rank(design) < 4:
        raise FitError("rank-deficient design")
    G = design.T @ design
    h = design.T @ y
    step = 1.0 / float(np.linalg.eigvalsh(G).max())
    lam = np.full(4, 0.25)
    for _ in range(max_iter):
        grad = G @ lam - h
        nxt = _project_simplex(lam - step * grad)
        if np.abs(nxt - lam).max() < tol * step:
            lam = nxt
            break
        lam = nxt
    return tuple(float(v) for v in lam)


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > (css - 1))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


@dataclass
class NwResult:
    value: float
    fallback: bool = False


def nadaraya_watson(
    train: list[tuple],
    query_x,
    bandwidth,
    kernel: str = "gaussian",
) -> NwResult:
    """Transformed kernel-weighted estimate of a response in (0, 1).

    Responses pass through the logit before weighting and the logistic
    after, so constant responses are reproduced exactly and estimates
    stay strictly inside (0, 1). bandwidth is a scalar or one value per
    feature (a diagonal bandwidth matrix).
    """
    if not train:
        raise FitError("no training records")
    X = np.array([np.atleast_1d(np.asarray(t[0], dtype=float)) for t in train])
    y = _clamp01(np.array([t[1] for t in train], dtype=float))
    q = np.atleast_1d(np.asarray(query_x, dtype=float))
    h = np.broadcast_to(np.atleast_1d(np.asarray(bandwidth, dtype=float)), q.shape)
    if np.any(h <= 0):
        raise FitError("bandwidth must be positive")
    u = (X - q) / h
    if kernel == "gaussian":
        logw = -0.5 * (u**2).sum(axis=1)
    elif kernel == "epanechnikov":
        s = (u**2).sum(axis=1)
        logw = np.where(s < 1.0, np.log(np.clip(1.0 - s, 1e-300, None)), -np.inf)
    else:
        raise FitError(f"unknown kernel {kernel!r}")
    w = np.exp(logw - logw.max()) if np.isfinite(logw.max()) else np.zeros_like(logw)
    total = w.sum()
    if not np.isfinite(total) or total <= 0:
        nearest = int(np.argmin(((X - q) ** 2).sum(axis=1)))
        logger.warning("kernel weights underflowed; falling back to nearest neighbor")
        return NwResult(value=float(y[nearest]), fallback=True)
    mean = float((w * _logit(y)).sum() / total)
    return NwResult(value=1.0 / (1.0 + math.exp(-mean)), fallback=False)
