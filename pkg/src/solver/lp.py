"""
Two-phase revised simplex.

The problem is brought to standard form min c^T z, A z = b, z >= 0, b >= 0
(bounds shifted out, free variables split, slacks appended), then solved with
Dantzig pricing, falling back to Bland's rule after a run of degenerate
pivots. In rational mode every quantity is a Fraction and the basis systems
are solved by exact Gaussian elimination, so the optimum is exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.config import SolverConfig
from src.solver.result import INFEASIBLE, MAXITER, OPTIMAL, UNBOUNDED, SolveResult

logger = logging.getLogger(__name__)

_DEGENERATE_RUN = 50

Bound = Tuple[Optional[float], Optional[float]]


@dataclass
class LPProblem:
    """min (or max) c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi (default x >= 0)."""
    c: Sequence
    A_ub: Optional[Sequence[Sequence]] = None
    b_ub: Optional[Sequence] = None
    A_eq: Optional[Sequence[Sequence]] = None
    b_eq: Optional[Sequence] = None
    bounds: Optional[Sequence[Bound]] = None
    maximize: bool = False
    labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        n = self.n
        for name, A, b in (("A_ub", self.A_ub, self.b_ub), ("A_eq", self.A_eq, self.b_eq)):
            if A is None:
                continue
            rows = list(A)
            if b is None or len(rows) != len(b):
                raise ValueError(f"{name} has {len(rows)} rows but its right-hand side does not match")
            for row in rows:
                if len(row) != n:
                    raise ValueError(f"{name} row of length {len(row)}, expected {n}")
        if self.bounds is not None and len(self.bounds) != n:
            raise ValueError(f"{len(self.bounds)} bounds for {n} variables")

    @property
    def n(self) -> int:
        return len(self.c)


def _gauss_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact solve of a square Fraction system."""
    n = A.shape[0]
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular basis")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[col])]
    return np.array([M[i][n] for i in range(n)], dtype=object)


class _Arith:
    def __init__(self, exact: bool, tol: float):
        self.exact = exact
        self.tol = Fraction(0) if exact else tol
        self.dtype = object if exact else float

    def conv(self, v) -> object:
        if self.exact:
            return v if isinstance(v, Fraction) else Fraction(v)
        return float(v)

    def solve(self, A: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.exact:
            return _gauss_solve(A, b)
        return np.linalg.solve(A, b)

    def zero(self):
        return Fraction(0) if self.exact else 0.0


@dataclass
class _Standard:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    const: object
    recover: List[List[Tuple[int, int]]]
    shift: List[object]
    row_sign: List[int]
    n_struct: int


def _to_standard(lp: LPProblem, ar: _Arith) -> _Standard:
    n = lp.n
    bounds = list(lp.bounds) if lp.bounds is not None else [(0, None)] * n
    cols: List[Tuple[int, int]] = []
    recover: List[List[Tuple[int, int]]] = []
    shift: List[object] = []
    cap_rows: List[Tuple[int, object]] = []
    for j, (lo, hi) in enumerate(bounds):
        lo = None if lo is None or np.isneginf(float(lo)) else ar.conv(lo)
        hi = None if hi is None or np.isposinf(float(hi)) else ar.conv(hi)
        if lo is not None and hi is not None and hi < lo:
            raise ValueError(f"variable {j}: upper bound {hi} below lower bound {lo}")
        k = len(cols)
        if lo is not None:
            shift.append(lo)
            cols.append((j, 1))
            recover.append([(k, 1)])
            if hi is not None:
                cap_rows.append((k, hi - lo))
        elif hi is not None:
            shift.append(hi)
            cols.append((j, -1))
            recover.append([(k, -1)])
        else:
            shift.append(ar.zero())
            cols.extend([(j, 1), (j, -1)])
            recover.append([(k, 1), (k + 1, -1)])
    n_struct = len(cols)

    def expand(row) -> Tuple[List[object], object]:
        row = [ar.conv(v) for v in row]
        out = [row[j] * s for j, s in cols]
        return out, sum((row[j] * shift[j] for j in range(n)), ar.zero())

    rows, rhs, kinds = [], [], []
    for row, b in zip(lp.A_ub or [], lp.b_ub or []):
        coeffs, moved = expand(row)
        rows.append(coeffs)
        rhs.append(ar.conv(b) - moved)
        kinds.append("ub")
    for k, cap in cap_rows:
        coeffs = [ar.zero()] * n_struct
        coeffs[k] = ar.conv(1)
        rows.append(coeffs)
        rhs.append(cap)
        kinds.append("ub")
    for row, b in zip(lp.A_eq or [], lp.b_eq or []):
        coeffs, moved = expand(row)
        rows.append(coeffs)
        rhs.append(ar.conv(b) - moved)
        kinds.append("eq")

    n_slack = kinds.count("ub")
    width = n_struct + n_slack
    A = np.empty((len(rows), width), dtype=ar.dtype)
    A[...] = ar.zero()
    s = n_struct
    for i, (coeffs, kind) in enumerate(zip(rows, kinds)):
        A[i, :n_struct] = coeffs
        if kind == "ub":
            A[i, s] = ar.conv(1)
            s += 1
    b = np.array(rhs, dtype=ar.dtype)
    row_sign = []
    for i in range(len(rows)):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            row_sign.append(-1)
        else:
            row_sign.append(1)

    sense = -1 if lp.maximize else 1
    cvec = [ar.conv(v) * sense for v in lp.c]
    c = np.array([cvec[j] * sgn for j, sgn in cols] + [ar.zero()] * n_slack, dtype=ar.dtype)
    const = sum((cvec[j] * shift[j] for j in range(n)), ar.zero())
    return _Standard(A, b, c, const, recover, shift, row_sign, n_struct)


def _simplex(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    basis: List[int],
    ar: _Arith,
    maxiter: int,
) -> Tuple[str, List[int], np.ndarray, int]:
    m, width = A.shape
    bland = False
    degenerate = 0
    for it in range(maxiter):
        B = A[:, basis]
        xB = ar.solve(B, b)
        y = ar.solve(B.T, c[basis])
        reduced = c - A.T @ y
        in_basis = np.zeros(width, dtype=bool)
        in_basis[basis] = True
        candidates = np.flatnonzero(~in_basis & (reduced < -ar.tol))
        if candidates.size == 0:
            return OPTIMAL, basis, xB, it
        if bland:
            enter = int(candidates[0])
        else:
            enter = int(candidates[np.argmin([reduced[j] for j in candidates])])
        u = ar.solve(B, A[:, enter])
        positive = [i for i in range(m) if u[i] > ar.tol]
        if not positive:
            return UNBOUNDED, basis, xB, it
        ratios = [xB[i] / u[i] for i in positive]
        best = min(ratios)
        ties = [i for i, r in zip(positive, ratios) if r == best or (not ar.exact and r - best <= ar.tol)]
        leave = min(ties, key=lambda i: basis[i]) if bland else ties[0]
        if best == 0 or (not ar.exact and best <= ar.tol):
            degenerate += 1
            if degenerate >= _DEGENERATE_RUN and not bland:
                logger.debug("switching to Bland's rule after %d degenerate pivots", degenerate)
                bland = True
        else:
            degenerate = 0
        basis = basis.copy()
        basis[leave] = enter
    return MAXITER, basis, ar.solve(A[:, basis], b), maxiter


def solve_lp(
    lp: LPProblem,
    mode: str = "float",
    tol: Optional[float] = None,
    maxiter: int = 10_000,
    config: Optional[SolverConfig] = None,
) -> SolveResult:
    """
    Solve lp exactly (mode="rational") or in floating point (mode="float").

    Infeasibility and unboundedness are reported through status. In rational
    mode x, y and the objective hold Fractions (x as an object array).
    """
    if mode not in ("float", "rational"):
        raise ValueError(f"unknown LP mode {mode!r}")
    cfg = config or SolverConfig()
    ar = _Arith(mode == "rational", cfg.lp_tol if tol is None else tol)
    std = _to_standard(lp, ar)
    A, b, c = std.A, std.b, std.c
    m, width = A.shape

    # phase 1: artificial identity basis
    art = np.eye(m, dtype=float).astype(ar.dtype) if not ar.exact else np.array(
        [[Fraction(int(i == j)) for j in range(m)] for i in range(m)], dtype=object
    ).reshape(m, m)
    A1 = np.hstack([A, art]) if m else A
    c1 = np.array([ar.zero()] * width + [ar.conv(1)] * m, dtype=ar.dtype)
    basis = list(range(width, width + m))
    status, basis, xB, it1 = _simplex(A1, b, c1, basis, ar, maxiter)
    if status == MAXITER:
        return SolveResult(status=MAXITER, iterations=it1)
    infeas = sum((xB[i] for i in range(m) if basis[i] >= width), ar.zero())
    if infeas > (ar.tol * (1 + max([abs(v) for v in b] + [0])) if not ar.exact else 0):
        return SolveResult(status=INFEASIBLE, iterations=it1, info={"phase1_residual": float(infeas)})

    # drive zero artificials out; rows where that is impossible are redundant
    keep_rows = list(range(m))
    for pos in range(m):
        if basis[pos] < width:
            continue
        Binv_row = ar.solve(A1[:, basis].T, np.array([ar.conv(int(i == pos)) for i in range(m)], dtype=ar.dtype))
        row = Binv_row @ A
        in_basis = set(basis)
        choice = next(
            (j for j in range(width) if j not in in_basis and (row[j] != 0 if ar.exact else abs(row[j]) > ar.tol)),
            None,
        )
        if choice is not None:
            basis[pos] = choice
        else:
            keep_rows.remove(basis[pos] - width)
    redundant = [i for i in range(m) if i not in keep_rows]
    if redundant:
        logger.debug("dropping %d redundant rows", len(redundant))
        pos_keep = [p for p in range(m) if basis[p] < width]
        basis = [basis[p] for p in pos_keep]
        A, b = A[keep_rows], b[keep_rows]

    status, basis, xB, it2 = _simplex(A, b, c, basis, ar, maxiter)
    iterations = it1 + it2
    if status != OPTIMAL:
        return SolveResult(status=status, iterations=iterations)

    z = np.array([ar.zero()] * width, dtype=ar.dtype)
    for i, j in enumerate(basis):
        z[j] = xB[i]
    x = np.array(
        [std.shift[j] + sum((z[k] * s for k, s in std.recover[j]), ar.zero()) for j in range(lp.n)],
        dtype=ar.dtype,
    )
    value = sum((ar.conv(cj) * xj for cj, xj in zip(lp.c, x)), ar.zero())
    y_std = ar.solve(A[:, basis].T, c[basis])
    sense = -1 if lp.maximize else 1
    y = np.array([ar.zero()] * m, dtype=ar.dtype)
    for pos, i in enumerate(keep_rows):
        y[i] = y_std[pos] * std.row_sign[i] * sense
    if not ar.exact:
        x = x.astype(float)
        y = y.astype(float)
    return SolveResult(
        status=OPTIMAL,
        objective=value,
        primal_objective=value,
        dual_objective=value,
        gap=0.0,
        x=x,
        y=y,
        iterations=iterations,
        info={"mode": mode, "redundant_rows": len(redundant)},
    )
