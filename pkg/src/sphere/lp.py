"""
Pair bounds on the sphere S^{n-1}.

delsarte_lp_sphere    min 1 + sum f_k  s.t.  f_k >= 0,  1 + sum f_k P_k^n(t) <= 0 on [-1, s]
theta2_avoid_angle    m(s) / (m(s) - 1) with m(s) = min_k P_k^n(s)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from numpy.polynomial import chebyshev as C

from src.config import AppConfig
from src.errors import Infeasible, NoInterior, NoNegativeValue
from src.sdp.problem import LinearSDPBuilder
from src.solver.result import INFEASIBLE, OPTIMAL, SolveResult
from src.solver.sdp import solve_sdp
from src.sphere.jacobi import JacobiFamily

logger = logging.getLogger(__name__)


def chebyshev_grid(a: float, b: float, N: int) -> np.ndarray:
    """N Chebyshev extreme points mapped to [a, b], endpoints included, ascending."""
    if N < 2:
        return np.array([0.5 * (a + b)])
    x = -np.cos(np.pi * np.arange(N) / (N - 1))
    return a + (b - a) * (x + 1) / 2


@dataclass
class SphereLPBound:
    n: int
    theta: float
    degree: int
    certify: str
    bound: float
    status: str
    certified: bool
    coefficients: List[float] = field(default_factory=list)
    max_violation: float = float("nan")
    repaired: bool = False
    result: Optional[SolveResult] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "theta_deg": float(np.degrees(self.theta)),
            "degree": self.degree,
            "certify": self.certify,
            "bound": float(self.bound),
            "status": self.status,
            "certified": self.certified,
            "repaired": self.repaired,
            "max_violation": float(self.max_violation),
            "f": [float(v) for v in self.coefficients],
        }


def _constraint_values(family: JacobiFamily, f: np.ndarray, t: np.ndarray) -> np.ndarray:
    """1 + sum_k f_k P_k(t), k = 1..d."""
    P = family.values(f.size, t)
    return 1.0 + f @ P[1:]


def _grid_program(family: JacobiFamily, d: int, grid: np.ndarray) -> Tuple[LinearSDPBuilder, List[int]]:
    P = family.values(d, grid)[1:]
    builder = LinearSDPBuilder(d, [f"f{k}" for k in range(1, d + 1)])
    builder.set_objective(np.ones(d), maximize=False)
    builder.add_nonnegative(range(d))
    for j in range(grid.size):
        builder.add_inequality(-P[:, j], 1.0)
    return builder, list(range(d))


def _chebyshev_product(u: int, v: int) -> np.ndarray:
    """Chebyshev coefficients of T_u T_v = (T_{u+v} + T_{|u-v|}) / 2."""
    out = np.zeros(u + v + 1)
    out[u + v] += 0.5
    out[abs(u - v)] += 0.5
    return out


def _sos_program(family: JacobiFamily, d: int, a: float, b: float) -> Tuple[LinearSDPBuilder, List[int]]:
    """
    -(1 + sum f_k P_k) = weighted sums of squares on [a, b] (Lukacs), posed in
    x in [-1, 1] with t = a + (b - a)(x + 1)/2 and Gram matrices in the
    Chebyshev basis.
    """
    to_t = Polynomial([a + (b - a) / 2, (b - a) / 2])
    cheb = np.zeros((d + 1, d + 1))
    for k in range(1, d + 1):
        coef = Polynomial(family.coefficients(k))(to_t).convert(kind=Chebyshev).coef
        cheb[k, : coef.size] = coef
    if d % 2 == 0:
        m = d // 2
        multipliers = [(np.array([1.0]), m), (np.array([0.5, 0.0, -0.5]), m - 1)]  # 1, 1 - x^2
    else:
        m = (d - 1) // 2
        multipliers = [(np.array([1.0, 1.0]), m), (np.array([1.0, -1.0]), m)]  # 1 + x, 1 - x

    params = [("f", k, 0, 0) for k in range(1, d + 1)]
    for g, (_, top) in enumerate(multipliers):
        if top < 0:
            continue
        params += [("X", g, u, v) for u in range(top + 1) for v in range(u, top + 1)]
    labels = [f"f{k}" if kind == "f" else f"X{g}[{u},{v}]" for kind, g, u, v in params]
    builder = LinearSDPBuilder(len(params), labels)

    rows = np.zeros((d + 1, len(params)))
    for p, (kind, g, u, v) in enumerate(params):
        if kind == "f":
            rows[:, p] = cheb[g]
            continue
        weight = multipliers[g][0]
        prod = C.chebmul(weight, _chebyshev_product(u, v)) * (1.0 if u == v else 2.0)
        if prod.size > d + 1 and np.any(np.abs(prod[d + 1:]) > 1e-14):
            raise ValueError("square multiplier exceeds the program degree")
        rows[: min(prod.size, d + 1), p] = prod[: d + 1]
    # sum_k f_k P_k + sigma_0 w_0 + sigma_1 w_1 = -1
    for j in range(d + 1):
        builder.add_equality(rows[j], -1.0 if j == 0 else 0.0)

    f_idx = [p for p, prm in enumerate(params) if prm[0] == "f"]
    objective = np.zeros(len(params))
    objective[f_idx] = 1.0
    builder.set_objective(objective, maximize=False)
    builder.add_nonnegative(f_idx)
    for g, (_, top) in enumerate(multipliers):
        if top < 0:
            continue
        size = top + 1
        terms = {}
        for p, (kind, gg, u, v) in enumerate(params):
            if kind == "X" and gg == g:
                E = np.zeros((size, size))
                E[u, v] = E[v, u] = 1.0
                terms[p] = E
        builder.add_lmi(terms, label=f"sigma{g}")
    return builder, f_idx


def delsarte_lp_sphere(
    n: int,
    theta: float,
    d: int,
    certify: str = "grid",
    config: Optional[AppConfig] = None,
) -> SphereLPBound:
    """
    Delsarte bound for spherical codes on S^{n-1} with minimal angle theta
    (radians), truncated at degree d.

    grid: the constraint on a Chebyshev grid of [-1, s], then audited on a
    finer grid; a violated audit rescales f so that the finer grid holds.
    sos: the constraint as a Lukacs sum-of-squares identity (certified).
    An infeasible truncation gives bound = inf.
    """
    if not 0 < theta < np.pi:
        raise ValueError(f"angle {theta} must lie in (0, pi)")
    if d < 1:
        raise ValueError(f"degree d={d} must be at least 1")
    cfg = config or AppConfig()
    s = float(np.cos(theta))
    family = JacobiFamily.sphere(n)

    if certify == "grid":
        builder, f_idx = _grid_program(family, d, chebyshev_grid(-1.0, s, cfg.sphere.grid_points))
    elif certify == "sos":
        builder, f_idx = _sos_program(family, d, -1.0, s)
    else:
        raise ValueError(f"unknown certification mode {certify!r}")

    try:
        problem = builder.build()
        result = solve_sdp(problem, config=cfg.solver)
    except (Infeasible, NoInterior) as exc:
        logger.warning("degree %d truncation has no interior (%s); raise d", d, exc)
        result = SolveResult(status=INFEASIBLE)
    if result.status != OPTIMAL:
        logger.warning("sphere LP (n=%d, d=%d) status %s; treating the truncation as infeasible, raise d",
                       n, d, result.status)
        return SphereLPBound(n, theta, d, certify, float("inf"), result.status, False, result=result)

    v = problem.lifted(result.x)
    f = np.maximum(np.asarray(v)[f_idx], 0.0)
    fine = chebyshev_grid(-1.0, s, cfg.sphere.grid_points * cfg.sphere.audit_factor)
    violation = float(np.max(_constraint_values(family, f, fine)))
    bound = 1.0 + float(f.sum())
    repaired = False
    certified = certify == "sos"
    if certify == "grid":
        if violation > 0:
            if violation >= 1:
                logger.warning("grid audit failed badly (violation %.3e); result not certified", violation)
            else:
                f = f / (1.0 - violation)
                repaired = True
                violation = float(np.max(_constraint_values(family, f, fine)))
                bound = 1.0 + float(f.sum())
                logger.info("grid audit repaired by scaling f; bound now %.8f", bound)
        certified = violation <= 1e-12
    logger.info("sphere LP bound n=%d theta=%.4f d=%d: %.8f (%s)", n, theta, d, bound, certify)
    return SphereLPBound(
        n=n,
        theta=theta,
        degree=d,
        certify=certify,
        bound=bound,
        status=result.status,
        certified=certified,
        coefficients=f.tolist(),
        max_violation=violation,
        repaired=repaired,
        result=result,
    )


@dataclass
class AngleAvoidance:
    n: int
    theta: float
    value: float
    minimum: float
    argmin: int
    settled: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "theta_deg": float(np.degrees(self.theta)),
            "value": self.value,
            "minimum": self.minimum,
            "argmin": self.argmin,
            "settled": self.settled,
        }


def theta2_avoid_angle(n: int, theta: float, K_search: int = 200, tail: int = 50) -> AngleAvoidance:
    """
    m(s) / (m(s) - 1) for s = cos(theta), m(s) = min over k <= K_search of P_k^n(s).

    The minimum is accepted as settled when none of the last `tail` degrees
    comes closer to it in absolute value than the minimum itself.
    """
    if not 0 < theta <= np.pi:
        raise ValueError(f"angle {theta} must lie in (0, pi]")
    s = float(np.cos(theta))
    if theta == np.pi:
        s = -1.0
    vals = JacobiFamily.sphere(n).values(K_search, s)
    k = 1 + int(np.argmin(vals[1:])) if K_search >= 1 else 0
    m = float(vals[k])
    value = m / (m - 1.0) if m != 1.0 else float("inf")
    if m >= 0:
        raise NoNegativeValue(f"no P_k({s:.6g}) < 0 for k <= {K_search}", minimum=m, value=value)
    start = max(1, K_search - tail + 1)
    tail_vals = vals[start:]
    settled = bool(k < start and np.all(np.abs(tail_vals) <= abs(m) + 1e-12) and np.all(tail_vals >= m - 1e-12))
    if not settled:
        logger.warning("minimum of P_k(%.6g) not settled within k <= %d; raise K_search", s, K_search)
    return AngleAvoidance(n=n, theta=theta, value=value, minimum=m, argmin=k, settled=settled)
