"""Batch distances, neighbor queries, triangle audits and 2-D maps."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

TRIANGLE_SLACK = 1e-12


@dataclass
class DistanceMatrix:
    codepoints: list[int]
    values: np.ndarray  # symmetric, zero diagonal
    fingerprint: str = ""

    def index_of(self, codepoint: int) -> int:
        try:
            return self.codepoints.index(codepoint)
        except ValueError:
            raise KeyError(f"U+{codepoint:05X} not in matrix") from None

    def entry(self, cp1: int, cp2: int) -> float:
        return float(self.values[self.index_of(cp1), self.index_of(cp2)])

    def to_csv(self) -> str:
        head = "," + ",".join(f"{cp:05x}" for cp in self.codepoints)
        lines = [head]
        for cp, row in zip(self.codepoints, self.values):
            lines.append(f"{cp:05x}," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def to_binary(self) -> tuple[bytes, str]:
        """Row-major little-endian doubles plus a JSON sidecar."""
        payload = self.values.astype("<f8").tobytes()
        sidecar = json.dumps(
            {
                "codepoints": [f"{cp:05x}" for cp in self.codepoints],
                "dtype": "<f8",
                "shape": list(self.values.shape),
                "fingerprint": self.fingerprint,
            },
            sort_keys=True,
        )
        return payload, sidecar

    @staticmethod
    def from_binary(payload: bytes, sidecar: str) -> "DistanceMatrix":
        meta = json.loads(sidecar)
        values = np.frombuffer(payload, dtype="<f8").reshape(meta["shape"]).copy()
        return DistanceMatrix(
            codepoints=[int(cp, 16) for cp in meta["codepoints"]],
            values=values,
            fingerprint=meta.get("fingerprint", ""),
        )


def distance_matrix(engine, codepoints: list[int], workers: int | None = None) -> DistanceMatrix:
    """All pairwise distances; the engine's caches make this embarrassingly parallel."""
    for cp in codepoints:
        if not engine.has(cp):
            raise KeyError(f"U+{cp:05X} missing from the store")
    n = len(codepoints)
    values = np.zeros((n, n))
    tasks = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def fill(task):
        i, j = task
        d, _ = engine.distance(codepoints[i], codepoints[j])
        return i, j, d

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(fill, tasks))
    else:
        results = [fill(t) for t in tasks]
    for i, j, d in results:
        values[i, j] = values[j, i] = d
    fp = hashlib.sha256(engine.config.fingerprint_data().encode()).hexdigest()[:16]
    return DistanceMatrix(codepoints=list(codepoints), values=values, fingerprint=fp)


def knn(matrix: DistanceMatrix, query: int, k: int) -> list[tuple[int, float]]:
    """k nearest neighbors of a kanji, ascending, ties broken by codepoint."""
    qi = matrix.index_of(query)
    order = sorted(
        (
            (float(matrix.values[qi, j]), matrix.codepoints[j])
            for j in range(len(matrix.codepoints))
            if j != qi
        ),
    )
    return [(cp, d) for d, cp in order[: max(k, 0)]]


@dataclass
class TriangleAudit:
    triples_total: int
    triples_violating: int
    inequalities_violating: int
    worst_gap: float
    worst_triple: tuple | None

    @property
    def violation_rate(self) -> float:
        return self.triples_violating / self.triples_total if self.triples_total else 0.0


def triangle_audit(matrix: DistanceMatrix) -> TriangleAudit:
    """Exhaustive scan of all triples for triangle-inequality violations."""
    D = matrix.values
    n = len(matrix.codepoints)
    triples = 0
    bad_triples = 0
    bad_ineqs = 0
    worst = 0.0
    worst_triple = None
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                triples += 1
                gaps = (
                    D[i, j] - D[i, k] - D[k, j],
                    D[i, k] - D[i, j] - D[j, k],
                    D[j, k] - D[j, i] - D[i, k],
                )
                bad = [g for g in gaps if g > TRIANGLE_SLACK]
                if bad:
                    bad_triples += 1
                    bad_ineqs += len(bad)
                    if max(bad) > worst:
                        worst = max(bad)
                        worst_triple = (
                            matrix.codepoints[i],
                            matrix.codepoints[j],
                            matrix.codepoints[k],
                        )
    return TriangleAudit(
        triples_total=triples,
        triples_violating=bad_triples,
        inequalities_violating=bad_ineqs,
        worst_gap=worst,
        worst_triple=worst_triple,
    )


@dataclass
class FocusedLayout:
    center: int
    points: list  # (codepoint, radius, angle)

    def to_json(self) -> str:
        return json.dumps(
            {
                "center": f"{self.center:05x}",
                "points": [
                    {"cp": f"{cp:05x}", "r": r, "theta": theta}
                    for cp, r, theta in self.points
                ],
            },
            sort_keys=True,
        )


def _chord(r1: float, t1: float, r2: float, t2: float) -> float:
    return math.sqrt(max(r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(t1 - t2), 0.0))


def _golden_min(f, lo: float, hi: float, tol: float = 1e-6) -> tuple[float, float]:
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def focused_mds(matrix: DistanceMatrix, center: int, restarts: int = 16) -> FocusedLayout:
    """Radial layout: exact distance to the center, angles by stress descent.

    Kanji are placed in ascending distance order; each new angle
    minimizes the squared deviations between chord distances to the
    already placed kanji and their matrix distances. The angle stress is
    multimodal, hence the golden-section restarts.
    """
    ci = matrix.index_of(center)
    others = sorted(
        (float(matrix.values[ci, j]), matrix.codepoints[j], j)
        for j in range(len(matrix.codepoints))
        if j != ci
    )
    placed: list[tuple[int, float, float]] = []
    placed_idx: list[int] = []
    for radius, cp, j in others:
        if not placed:
            placed.append((cp, radius, 0.0))
            placed_idx.append(j)
            continue

        targets = [float(matrix.values[j, pj]) for pj in placed_idx]

        def stress(theta: float) -> float:
            return sum(
                (_chord(radius, theta, pr, pt) - t) ** 2
                for (_, pr, pt), t in zip(placed, targets)
            )

        best_theta, best_val = 0.0, stress(0.0)
        for s in range(restarts):
            lo = 2 * math.pi * s / restarts
            hi = 2 * math.pi * (s + 1) / restarts
            theta, val = _golden_min(stress, lo, hi)
            if val < best_val - 1e-12:
                best_theta, best_val = theta % (2 * math.pi), val
        placed.append((cp, radius, best_theta))
        placed_idx.append(j)
    return FocusedLayout(center=center, points=placed)


@dataclass
class SmacofResult:
    coords: np.ndarray
    stress: float
    stress_trace: list[float] = field(default_factory=list)


def _classical_start(D: np.ndarray, dims: int) -> np.ndarray:
    n = D.shape[0]
    J = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * J @ (D**2) @ J
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(vals)[::-1][:dims]
    lam = np.clip(vals[order], 0.0, None)
    return vecs[:, order] * np.sqrt(lam)


def _stress(D: np.ndarray, X: np.ndarray) -> float:
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    iu = np.triu_indices(D.shape[0], 1)
    return float(((dist[iu] - D[iu]) ** 2).sum())


def metric_mds(
    matrix: DistanceMatrix | np.ndarray,
    dims: int = 2,
    max_iter: int = 500,
    tol: float = 1e-8,
) -> SmacofResult:
    """Stress majorization from a classical-scaling start.

    Each step applies the Guttman transform, which never increases the
    stress; iteration stops once the decrease falls below tol.
    """
    D = matrix.values if isinstance(matrix, DistanceMatrix) else np.asarray(matrix, dtype=float)
    n = D.shape[0]
    if n == 1:
        return SmacofResult(coords=np.zeros((1, dims)), stress=0.0, stress_trace=[0.0])
    X = _classical_start(D, dims)
    trace = [_stress(D, X)]
    for _ in range(max_iter):
        diff = X[:, None, :] - X[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dist > 1e-15, D / dist, 0.0)
        B = -ratio
        np.fill_diagonal(B, 0.0)
        np.fill_diagonal(B, -B.sum(axis=1))
        X = (B @ X) / n
        trace.append(_stress(D, X))
        if trace[-2] - trace[-1] < tol:
            break
    return SmacofResult(coords=X, stress=trace[-1], stress_trace=trace)
