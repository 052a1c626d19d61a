"""
Three-point bound for spherical codes.

Y_k(u, v, t)[i, j] = u^i v^j Q_k(u, v, t) for 0 <= i, j <= d - k, where
Q_k(u, v, t) = ((1-u^2)(1-v^2))^(k/2) P_k^{n-1}((t - uv) / sqrt((1-u^2)(1-v^2))).
Since P_k has the parity of k, Q_k is the polynomial
sum_l a_l (t - uv)^l ((1-u^2)(1-v^2))^((k-l)/2) over l = k, k-2, ...
S_k is the average of Y_k over the six orderings of (u, v, t).
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from tqdm import tqdm

from src.config import AppConfig
from src.sdp.problem import LinearSDPBuilder, SDPAProblem
from src.solver.result import SolveResult
from src.solver.sdp import solve_sdp
from src.sphere.jacobi import JacobiFamily
from src.sphere.lp import chebyshev_grid

logger = logging.getLogger(__name__)

_ORDERINGS = list(itertools.permutations(range(3)))


def _check(n: int, d: int, k: int) -> None:
    if n < 3:
        raise ValueError(f"three-point matrices need n >= 3, got n={n}")
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got k={k}, d={d}")


def q_poly(n: int, k: int, u, v, t) -> np.ndarray:
    """Q_k^{n-1}(u, v, t) in its polynomial form, vectorized over the arguments."""
    u, v, t = (np.asarray(a, dtype=float) for a in (u, v, t))
    coef = JacobiFamily.sphere(n - 1).coefficients(k)
    x = t - u * v
    rho2 = (1 - u * u) * (1 - v * v)
    out = np.zeros(np.broadcast(u, v, t).shape)
    for l in range(k % 2, k + 1, 2):
        if coef[l] != 0:
            out = out + coef[l] * x ** l * rho2 ** ((k - l) // 2)
    return out


def yk_eval(n: int, d: int, k: int, u: float, v: float, t: float, limit: bool = True) -> np.ndarray:
    """
    The (d-k+1) x (d-k+1) matrix Y_k^n(u, v, t).

    With limit=True the value at |u| = 1 or |v| = 1 is the limit along
    realizable triples (Q_k = 0 for k >= 1); otherwise the polynomial form is
    used everywhere. Both agree on realizable triples.
    """
    _check(n, d, k)
    if limit and k >= 1 and (abs(abs(u) - 1) < 1e-15 or abs(abs(v) - 1) < 1e-15):
        q = 0.0
    else:
        q = float(q_poly(n, k, u, v, t))
    m = d - k + 1
    return np.outer(float(u) ** np.arange(m), float(v) ** np.arange(m)) * q


def sk_symmetrize(n: int, d: int, k: int, u: float, v: float, t: float) -> np.ndarray:
    """Average of Y_k^n over the orderings of (u, v, t), polynomial form."""
    _check(n, d, k)
    args = (u, v, t)
    acc = sum(yk_eval(n, d, k, *(args[i] for i in order), limit=False) for order in _ORDERINGS)
    S = acc / len(_ORDERINGS)
    return 0.5 * (S + S.T)


def _s_batch(n: int, d: int, k: int, pts: np.ndarray) -> np.ndarray:
    """(N, m, m) array of S_k at the rows (u, v, t) of pts."""
    m = d - k + 1
    out = np.zeros((pts.shape[0], m, m))
    powers = np.arange(m)
    for order in _ORDERINGS:
        a, b, c = (pts[:, i] for i in order)
        q = q_poly(n, k, a, b, c)
        out += (a[:, None] ** powers)[:, :, None] * (b[:, None] ** powers)[:, None, :] * q[:, None, None]
    out /= len(_ORDERINGS)
    return 0.5 * (out + out.transpose(0, 2, 1))


def _params(d: int) -> List[Tuple[int, int, int]]:
    return [(k, i, j) for k in range(d + 1) for i in range(d - k + 1) for j in range(i, d - k + 1)]


def constraint_rows(n: int, d: int, pts: np.ndarray) -> np.ndarray:
    """Row per point: coefficients of sum_k <F_k, S_k(u, v, t)> over the upper-triangular entries of the F_k."""
    params = _params(d)
    rows = np.zeros((pts.shape[0], len(params)))
    col = 0
    for k in range(d + 1):
        S = _s_batch(n, d, k, pts)
        m = d - k + 1
        for i in range(m):
            for j in range(i, m):
                rows[:, col] = S[:, i, j] * (1.0 if i == j else 2.0)
                col += 1
    return rows


def three_point_value(n: int, d: int, F: Sequence[np.ndarray], pts: np.ndarray) -> np.ndarray:
    """sum_k <F_k, S_k(u, v, t)> at each row of pts."""
    total = np.zeros(pts.shape[0])
    for order in _ORDERINGS:
        a, b, c = (pts[:, i] for i in order)
        for k, Fk in enumerate(F):
            Fs = 0.5 * (np.asarray(Fk) + np.asarray(Fk).T)
            total += q_poly(n, k, a, b, c) * npoly.polyval2d(a, b, Fs)
    return total / len(_ORDERINGS)


def realizable(pts: np.ndarray) -> np.ndarray:
    """Mask of (u, v, t) that are the inner products of three unit vectors."""
    u, v, t = pts[:, 0], pts[:, 1], pts[:, 2]
    return 1 + 2 * u * v * t - u * u - v * v - t * t >= -1e-12


def box_points(s: float, N: int, domain: str = "box") -> np.ndarray:
    """Sorted triples u <= v <= t of an N-point grid of [-1, s] (S_k is symmetric)."""
    g = chebyshev_grid(-1.0, s, N)
    i, j, k = np.array([(a, b, c) for a in range(N) for b in range(a, N) for c in range(b, N)]).T
    pts = np.stack([g[i], g[j], g[k]], axis=1)
    if domain == "realizable":
        pts = pts[realizable(pts)]
    elif domain != "box":
        raise ValueError(f"unknown domain {domain!r}")
    return pts


def segment_points(s: float, N: int) -> np.ndarray:
    u = chebyshev_grid(-1.0, s, N)
    return np.stack([u, u, np.ones_like(u)], axis=1)


@dataclass
class ThreePointBound:
    n: int
    theta: float
    degree: int
    bound: float
    status: str
    grid_relaxed: bool
    audit_passed: bool
    box_violation: float
    segment_violation: float
    box_points: int
    segment_points: int
    domain: str
    F: List[np.ndarray] = field(default_factory=list, repr=False)
    problem: Optional[SDPAProblem] = field(default=None, repr=False)
    result: Optional[SolveResult] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "theta_deg": float(np.degrees(self.theta)),
            "degree": self.degree,
            "bound": float(self.bound),
            "status": self.status,
            "grid_relaxed": self.grid_relaxed,
            "audit_passed": self.audit_passed,
            "box_violation": float(self.box_violation),
            "segment_violation": float(self.segment_violation),
            "box_points": self.box_points,
            "segment_points": self.segment_points,
            "domain": self.domain,
        }


def _max_in_chunks(
    n: int, d: int, F: List[np.ndarray], pts: np.ndarray, chunk: int = 100_000, workers: int = 1
) -> float:
    """Largest constraint value over pts, evaluated chunk by chunk on up to `workers` threads."""
    starts = range(0, pts.shape[0], chunk)

    def chunk_max(start: int) -> float:
        return float(np.max(three_point_value(n, d, F, pts[start:start + chunk])))

    bar = dict(total=len(starts), desc="audit", leave=False, disable=pts.shape[0] <= chunk)
    if workers <= 1:
        return max(tqdm(map(chunk_max, starts), **bar))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return max(tqdm(pool.map(chunk_max, starts), **bar))


def three_point_sdp(
    n: int,
    theta: float,
    d: int,
    grid_density: Optional[int] = None,
    segment_density: Optional[int] = None,
    domain: Optional[str] = None,
    config: Optional[AppConfig] = None,
) -> ThreePointBound:
    """
    inf 1 + <F_0, J>  s.t.  F_k >= 0,
        sum_k <F_k, S_k(u, u, 1)> <= -1/3   on u in [-1, s],
        sum_k <F_k, S_k(u, v, t)> <= 0      on [-1, s]^3,
    with both constraints imposed on grids and audited on grids refined by
    sphere.audit_refine. The value bounds codes of minimal angle theta only up
    to the discretization.
    """
    cfg = config or AppConfig()
    if not 0 < theta <= np.pi:
        raise ValueError(f"angle {theta} must lie in (0, pi]")
    s = float(np.cos(theta))
    N_box = grid_density or cfg.sphere.box_grid
    N_seg = segment_density or cfg.sphere.segment_grid
    domain = domain or cfg.sphere.domain
    params = _params(d)

    box = box_points(s, N_box, domain)
    seg = segment_points(s, N_seg)
    logger.info("three-point program: %d parameters, %d box and %d segment constraints",
                len(params), box.shape[0], seg.shape[0])

    builder = LinearSDPBuilder(len(params), [f"F{k}[{i},{j}]" for k, i, j in params])
    objective = np.array([(1.0 if i == j else 2.0) if k == 0 else 0.0 for k, i, j in params])
    builder.set_objective(objective, maximize=False)
    for row in constraint_rows(n, d, seg):
        builder.add_inequality(-row, 1.0 / 3.0)
    for row in constraint_rows(n, d, box):
        builder.add_inequality(-row, 0.0)
    for k in range(d + 1):
        m = d - k + 1
        terms = {}
        for p, (kk, i, j) in enumerate(params):
            if kk == k:
                E = np.zeros((m, m))
                E[i, j] = E[j, i] = 1.0
                terms[p] = E
        builder.add_lmi(terms, label=f"F{k}")

    problem = builder.build()
    result = solve_sdp(problem, config=cfg.solver)
    v = problem.lifted(result.x)
    F = [np.zeros((d - k + 1,) * 2) for k in range(d + 1)]
    for p, (k, i, j) in enumerate(params):
        F[k][i, j] = F[k][j, i] = v[p]
    bound = 1.0 + float(np.sum(F[0]))

    refine = cfg.sphere.audit_refine
    fine_box = box_points(s, N_box * refine, domain)
    fine_seg = segment_points(s, N_seg * refine)
    box_violation = _max_in_chunks(n, d, F, fine_box, workers=cfg.threads)
    seg_violation = float(np.max(three_point_value(n, d, F, fine_seg))) + 1.0 / 3.0
    slack = cfg.sphere.audit_slack
    passed = box_violation <= slack and seg_violation <= slack
    if not passed:
        logger.warning("three-point audit failed: box %.3e, segment %.3e (slack %.1e)", box_violation, seg_violation, slack)
    logger.info("three-point bound n=%d theta=%.4f d=%d: %.6f", n, theta, d, bound)
    return ThreePointBound(
        n=n,
        theta=theta,
        degree=d,
        bound=bound,
        status=result.status,
        grid_relaxed=True,
        audit_passed=passed,
        box_violation=box_violation,
        segment_violation=seg_violation,
        box_points=int(box.shape[0]),
        segment_points=int(seg.shape[0]),
        domain=domain,
        F=F,
        problem=problem,
        result=result,
    )
