"""Exact unbalanced Wasserstein distance between pixel images.

Mass moves at cost delta^p per unit and may be created or destroyed at
b^p/2 per unit on either side. The problem reduces to a balanced
transport instance with one slack point per side; that instance is
solved exactly (POT's network simplex when available, otherwise an
equivalent linear program via HiGHS). A dense LP oracle over all pixel
pairs is kept as an independent reference for small grids.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .raster import PixelImage

_pot = None
_pot_checked = False


def _pot_module():
    # deferred: importing POT drags in heavy optional backends
    global _pot, _pot_checked
    if not _pot_checked:
        _pot_checked = True
        try:
            import ot

            _pot = ot
        except ImportError:
            _pot = None
    return _pot


ORACLE_MAX_N = 8
_EMD_MAX_ITER = 10_000_000


class UbwError(ValueError):
    pass


@dataclass(frozen=True)
class UbwParams:
    p: float = 1.0
    b: float = 0.4

    def __post_init__(self):
        if self.p < 1:
            raise UbwError("exponent p must be >= 1")
        if not (0 < self.b <= math.sqrt(2)):
            raise UbwError("reach b must lie in (0, sqrt(2)]")

    @property
    def slack_cost(self) -> float:
        return self.b**self.p / 2.0


@dataclass
class TransportPlan:
    n: int
    mass_a: float
    mass_b: float
    moved: float  # total transported mass
    entries: list = field(default_factory=list)  # ((r,c), (r',c'), mass)
    created: list = field(default_factory=list)  # ((r,c), mass)
    destroyed: list = field(default_factory=list)  # ((r,c), mass)

    @property
    def created_mass(self) -> float:
        return self.mass_b - self.moved

    @property
    def destroyed_mass(self) -> float:
        return self.mass_a - self.moved

    def objective(self, params: UbwParams) -> float:
        """Recompute the transport cost from the plan itself."""
        n = self.n
        move = 0.0
        for (r, c), (r2, c2), m in self.entries:
            delta = math.hypot((r - r2) / n, (c - c2) / n)
            move += delta**params.p * m
        waste = (self.created_mass + self.destroyed_mass) * params.slack_cost
        return (move + waste) ** (1.0 / params.p)

    def to_json(self) -> str:
        """Export with zero-distance entries left implicit."""
        return json.dumps(
            {
                "n": self.n,
                "mass_a": self.mass_a,
                "mass_b": self.mass_b,
                "moved": self.moved,
                "entries": [
                    {"from": list(src), "to": list(dst), "mass": m}
                    for src, dst, m in self.entries
                    if src != dst
                ],
                "created": [{"at": list(px), "mass": m} for px, m in self.created],
                "destroyed": [{"at": list(px), "mass": m} for px, m in self.destroyed],
            },
            sort_keys=True,
        )


def _check_pair(a: PixelImage, b: PixelImage) -> None:
    if a.n != b.n:
        raise UbwError(f"resolution mismatch: {a.n} vs {b.n}")
    if a.total <= 0 and b.total <= 0:
        raise UbwError("both images are empty")


def ubw_distance(a: PixelImage, b: PixelImage, params: UbwParams = UbwParams()) -> tuple[float, TransportPlan]:
    """Minimal cost of turning image a into image b, with the plan."""
    _check_pair(a, b)
    n = a.n
    ia = np.argwhere(a.cells > 0)
    ib = np.argwhere(b.cells > 0)
    wa = a.cells[a.cells > 0]
    wb = b.cells[b.cells > 0]
    plan = TransportPlan(n=n, mass_a=float(wa.sum()), mass_b=float(wb.sum()), moved=0.0)

    if len(ia) == 0:
        plan.created = [((int(r), int(c)), float(m)) for (r, c), m in zip(ib, wb)]
        return plan.objective(params), plan
    if len(ib) == 0:
        plan.destroyed = [((int(r), int(c)), float(m)) for (r, c), m in zip(ia, wa)]
        return plan.objective(params), plan

    pa = ia / n
    pb = ib / n
    delta = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2))
    cost = delta**params.p

    na, nb = len(wa), len(wb)
    M = np.zeros((na + 1, nb + 1))
    M[:na, :nb] = cost
    M[na, :nb] = params.slack_cost
    M[:na, nb] = params.slack_cost
    row = np.concatenate([wa, [plan.mass_b]])
    col = np.concatenate([wb, [plan.mass_a]])
    G = _solve_balanced(row, col, M)

    moved = G[:na, :nb]
    keep = moved > 1e-15
    for i, j in zip(*np.nonzero(keep)):
        plan.entries.append(
            ((int(ia[i, 0]), int(ia[i, 1])), (int(ib[j, 0]), int(ib[j, 1])), float(moved[i, j]))
        )
    plan.moved = float(moved.sum())
    dest = G[:na, nb]
    for i in np.flatnonzero(dest > 1e-15):
        plan.destroyed.append(((int(ia[i, 0]), int(ia[i, 1])), float(dest[i])))
    crea = G[na, :nb]
    for j in np.flatnonzero(crea > 1e-15):
        plan.created.append(((int(ib[j, 0]), int(ib[j, 1])), float(crea[j])))
    return plan.objective(params), plan


def _solve_balanced(row: np.ndarray, col: np.ndarray, M: np.ndarray) -> np.ndarray:
    pot = _pot_module()
    if pot is not None:
        try:
            # the cython core skips the python wrapper's per-call overhead,
            # which dominates for the many small slack-bound solves
            from ot.lp._network_simplex import emd_c

            G, _cost, _u, _v, rc = emd_c(
                np.ascontiguousarray(row, dtype=np.float64),
                np.ascontiguousarray(col, dtype=np.float64),
                np.ascontiguousarray(M, dtype=np.float64),
                _EMD_MAX_ITER,
                1,
            )
            if rc == 1:  # optimal
                return G
        except ImportError:
            pass
        return pot.emd(row, col, M, numItermax=_EMD_MAX_ITER)
    return _solve_balanced_linprog(row, col, M)


def _solve_balanced_linprog(row: np.ndarray, col: np.ndarray, M: np.ndarray) -> np.ndarray:
    from scipy import sparse
    from scipy.optimize import linprog

    nr, nc = M.shape
    nv = nr * nc
    data = np.ones(2 * nv)
    rows = np.empty(2 * nv, dtype=int)
    cols = np.empty(2 * nv, dtype=int)
    k = np.arange(nv)
    rows[:nv] = k // nc
    rows[nv:] = nr + (k % nc)
    cols[:nv] = k
    cols[nv:] = k
    A = sparse.coo_matrix((data, (rows, cols)), shape=(nr + nc, nv)).tocsr()
    rhs = np.concatenate([row, col])
    res = linprog(M.ravel(), A_eq=A, b_eq=rhs, bounds=(0, None), method="highs")
    if res.status != 0:
        raise UbwError(f"transport LP failed: {res.message}")
    return res.x.reshape(nr, nc)


def relative_ubw(a: PixelImage, b: PixelImage, params: UbwParams = UbwParams()) -> float:
    """Distance scaled by its worst case, b * max of the total masses."""
    cost, _ = ubw_distance(a, b, params)
    return cost / (params.b * max(a.total, b.total) ** (1.0 / params.p))


def transport_lower_bound(a: PixelImage, b: PixelImage, params: UbwParams = UbwParams()) -> float:
    """Cheap lower bound on relative_ubw via the axis marginals.

    Projecting any feasible plan onto one axis keeps it feasible for the
    1-D problem and never increases the move distances, so the 1-D costs
    (and the unavoidable mass-difference deletion) bound the 2-D cost
    from below.
    """
    _check_pair(a, b)
    n = a.n
    best = abs(a.total - b.total) * params.slack_cost
    coords = (np.arange(n) + 0.5) / n
    delta = np.abs(coords[:, None] - coords[None, :])
    for axis in (0, 1):
        wa = a.cells.sum(axis=axis)
        wb = b.cells.sum(axis=axis)
        ka = np.flatnonzero(wa > 0)
        kb = np.flatnonzero(wb > 0)
        if len(ka) == 0 or len(kb) == 0:
            continue
        M = np.zeros((len(ka) + 1, len(kb) + 1))
        M[: len(ka), : len(kb)] = delta[np.ix_(ka, kb)] ** params.p
        M[len(ka), : len(kb)] = params.slack_cost
        M[: len(ka), len(kb)] = params.slack_cost
        row = np.concatenate([wa[ka], [wb[kb].sum()]])
        col = np.concatenate([wb[kb], [wa[ka].sum()]])
        G = _solve_balanced(row, col, M)
        best = max(best, float((G * M).sum()))
    denom = params.b * max(a.total, b.total) ** (1.0 / params.p)
    return best ** (1.0 / params.p) / denom


def brute_oracle(a: PixelImage, b: PixelImage, params: UbwParams = UbwParams()) -> float:
    """Dense LP over all pixel pairs; the reference for ubw_distance.

    Kept deliberately independent of the production solver: every
    variable is present and slack mass is expressed through the
    objective constant rather than slack nodes.
    """
    from scipy import sparse
    from scipy.optimize import linprog

    _check_pair(a, b)
    n = a.n
    if n > ORACLE_MAX_N:
        raise UbwError(f"oracle restricted to n <= {ORACLE_MAX_N}")
    coords = np.array([((i + 0.5) / n, (j + 0.5) / n) for i in range(n) for j in range(n)])
    delta = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2))
    c = delta**params.p - params.b**params.p  # moving vs delete-and-create
    npx = n * n
    nv = npx * npx
    k = np.arange(nv)
    rows = np.concatenate([k // npx, npx + (k % npx)])
    cols = np.concatenate([k, k])
    A = sparse.coo_matrix((np.ones(2 * nv), (rows, cols)), shape=(2 * npx, nv)).tocsr()
    rhs = np.concatenate([a.cells.ravel(), b.cells.ravel()])
    res = linprog(c.ravel(), A_ub=A, b_ub=rhs, bounds=(0, None), method="highs")
    if res.status != 0:
        raise UbwError(f"oracle LP failed: {res.message}")
    raw = float(res.fun) + (a.total + b.total) * params.slack_cost
    return max(raw, 0.0) ** (1.0 / params.p)
