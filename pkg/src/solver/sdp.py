"""
Primal-dual interior point method for SDPA-form problems.

Infeasible start from X = Y = lambda I, Nesterov-Todd scaling, a predictor
step to choose the centering parameter and a corrector step, separate primal
and dual step lengths. Dense blocks use dense linear algebra throughout;
diagonal blocks are kept as vectors.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg, sparse

from src.config import SolverConfig
from src.errors import MaxIter, NoInterior, WeakDualityViolation
from src.sdp.problem import SDPAProblem
from src.solver.result import INFEASIBLE, MAXITER, OPTIMAL, UNBOUNDED, SolveResult

logger = logging.getLogger(__name__)

_STALL = 1e-8
_DIVERGE = 1e10


@dataclass
class _DenseBlock:
    size: int
    F0: np.ndarray
    rows: sparse.csr_matrix  # (m, size*size), F_1..F_m
    active: np.ndarray
    mats: List[sparse.csr_matrix]

    def apply(self, dx: np.ndarray) -> np.ndarray:
        return np.asarray(self.rows.T @ dx).reshape(self.size, self.size)

    def adjoint(self, Y: np.ndarray) -> np.ndarray:
        return np.asarray(self.rows @ Y.ravel()).ravel()


@dataclass
class _DiagBlock:
    size: int
    f0: np.ndarray
    rows: Union[np.ndarray, sparse.csr_matrix]  # (m, size)

    def apply(self, dx: np.ndarray) -> np.ndarray:
        return np.asarray(self.rows.T @ dx).ravel()

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.rows @ y).ravel()


def _prepare(problem: SDPAProblem):
    blocks = []
    for blk in problem.blocks:
        F0 = np.asarray(blk.coeffs[0].todense()).ravel()
        rows = blk.coeffs[1:].tocsr()
        if blk.diagonal:
            density = rows.nnz / max(1, rows.shape[0] * rows.shape[1])
            blocks.append(_DiagBlock(blk.size, F0, rows.toarray() if density > 0.2 else rows))
            continue
        s = blk.size
        active = np.flatnonzero(np.diff(rows.indptr))
        mats = [rows[j].reshape((s, s)).tocsr() for j in active]
        blocks.append(_DenseBlock(s, F0.reshape(s, s), rows, active, mats))
    return blocks


def _max_step_dense(X: np.ndarray, dX: np.ndarray) -> float:
    try:
        L = linalg.cholesky(X, lower=True)
    except linalg.LinAlgError:
        return 0.0
    T = linalg.solve_triangular(L, dX, lower=True)
    T = linalg.solve_triangular(L, T.T, lower=True)
    lam = linalg.eigvalsh(0.5 * (T + T.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_diag(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not neg.any():
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def _nt_scaling(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """V with V X V = Y."""
    w, U = linalg.eigh(Y)
    w = np.clip(w, np.finfo(float).tiny, None)
    Yh = (U * np.sqrt(w)) @ U.T
    S = Yh @ X @ Yh
    s, W = linalg.eigh(0.5 * (S + S.T))
    s = np.clip(s, np.finfo(float).tiny, None)
    Sih = (W / np.sqrt(s)) @ W.T
    V = Yh @ Sih @ Yh
    return 0.5 * (V + V.T)


def _trivial(problem: SDPAProblem, cfg: SolverConfig) -> SolveResult:
    """No free variables: the program is the feasibility question -F_0 >= 0."""
    worst = 0.0
    for blk in problem.blocks:
        S = blk.evaluate(np.zeros(0))
        lam = float(S.min()) if blk.diagonal else float(linalg.eigvalsh(S)[0])
        worst = min(worst, lam)
    x = np.zeros(0)
    status = OPTIMAL if worst >= -cfg.feas_tol else INFEASIBLE
    value = problem.objective_value(x) if status == OPTIMAL else float("nan")
    return SolveResult(status=status, objective=value, primal_objective=0.0, dual_objective=0.0,
                       gap=0.0, x=x, info={"min_slack_eigenvalue": worst})


def solve_sdp(
    problem: SDPAProblem,
    tol: Optional[float] = None,
    maxiter: Optional[int] = None,
    config: Optional[SolverConfig] = None,
    strict: bool = False,
) -> SolveResult:
    """
    Primal-dual interior point method for an SDPA problem. Running out of
    iterations gives status maxiter, or raises MaxIter when strict.
    """
    cfg = config or SolverConfig()
    tol = cfg.tol if tol is None else tol
    maxiter = cfg.maxiter if maxiter is None else maxiter
    feas_tol = max(cfg.feas_tol, tol)
    m = problem.m
    started = time.perf_counter()

    if m == 0:
        return _trivial(problem, cfg)
    c = problem.c
    blocks = _prepare(problem)
    if not blocks:
        status = OPTIMAL if not np.any(c) else UNBOUNDED
        x = np.zeros(m)
        return SolveResult(status=status, objective=problem.objective_value(x) if status == OPTIMAL else float("nan"),
                           primal_objective=0.0, dual_objective=0.0, gap=0.0, x=x)

    scale = max(
        [1.0, float(np.abs(c).max())]
        + [float(abs(blk.coeffs).max()) if blk.coeffs.nnz else 0.0 for blk in problem.blocks]
    )
    lam = 10.0 * scale
    dim = sum(b.size for b in blocks)
    norm_F0 = np.sqrt(sum(float(np.sum(b.F0 ** 2)) if isinstance(b, _DenseBlock) else float(b.f0 @ b.f0) for b in blocks))
    norm_c = float(np.linalg.norm(c))

    x = np.zeros(m)
    X = [lam * np.eye(b.size) if isinstance(b, _DenseBlock) else lam * np.ones(b.size) for b in blocks]
    Y = [lam * np.eye(b.size) if isinstance(b, _DenseBlock) else lam * np.ones(b.size) for b in blocks]

    def slack(dx: np.ndarray) -> List[np.ndarray]:
        out = []
        for b in blocks:
            S = b.apply(dx)
            out.append(S - b.F0 if isinstance(b, _DenseBlock) else S - b.f0)
        return out

    def inner(A: List[np.ndarray], B: List[np.ndarray]) -> float:
        return float(sum(np.sum(a * b) for a, b in zip(A, B)))

    status = MAXITER
    weak_violations = 0
    it = 0
    pobj = dobj = gap = float("nan")
    for it in range(1, maxiter + 1):
        if not (np.all(np.isfinite(x)) and all(np.all(np.isfinite(Z)) for Z in X + Y)):
            raise NoInterior(
                f"iterates overflowed at iteration {it}; the program is likely infeasible or unbounded "
                "without a recognisable certificate, try perturbing it slightly"
            )
        P = [s - Xk for s, Xk in zip(slack(x), X)]
        d = c - sum(b.adjoint(Yk) for b, Yk in zip(blocks, Y))
        pobj = float(c @ x)
        dobj = sum(
            float(np.sum(b.F0 * Yk)) if isinstance(b, _DenseBlock) else float(b.f0 @ Yk) for b, Yk in zip(blocks, Y)
        )
        mu = inner(X, Y) / dim
        pinf = np.sqrt(inner(P, P)) / (1.0 + norm_F0)
        dinf = float(np.linalg.norm(d)) / (1.0 + norm_c)
        gap = abs(pobj - dobj) / max(1.0, 0.5 * (abs(pobj) + abs(dobj)))
        logger.debug("it %3d  pobj %.10e  dobj %.10e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e",
                     it, pobj, dobj, gap, pinf, dinf, mu)

        # pobj - dobj = X.Y + x.d + P.Y for any iterate, and X.Y >= 0
        xd, py = float(x @ d), inner(P, Y)
        excess = pobj - dobj - xd - py
        if excess < -10 * feas_tol * (1.0 + abs(pobj) + abs(dobj) + abs(xd) + abs(py)):
            weak_violations += 1
            logger.warning("weak duality violated at iteration %d: primal %.6e, dual %.6e, excess %.3e",
                           it, pobj, dobj, excess)
            if strict:
                raise WeakDualityViolation(f"weak duality violated at iteration {it} (excess {excess:.3e})")

        if pinf <= feas_tol and dinf <= feas_tol and gap <= tol:
            status = OPTIMAL
            break
        if pinf <= feas_tol and pobj < -_DIVERGE * scale:
            status = UNBOUNDED
            break
        if dinf <= feas_tol and dobj > _DIVERGE * scale:
            status = INFEASIBLE
            break
        # Y / |Y| with F_i.Y ~ 0 and F_0.Y > 0 certifies that no x is feasible
        ynorm = np.sqrt(inner(Y, Y))
        if ynorm > _DIVERGE * scale and dobj > feas_tol * ynorm and np.linalg.norm(c - d) <= feas_tol * ynorm:
            status = INFEASIBLE
            break
        # a growing x with sum x_i F_i ~ X >= 0 and c.x < 0 certifies an unbounded program
        xnorm = max(float(np.linalg.norm(x)), np.sqrt(inner(X, X)))
        if xnorm > _DIVERGE * scale and pobj < -feas_tol * xnorm and np.sqrt(inner(P, P)) <= feas_tol * xnorm:
            status = UNBOUNDED
            break

        scal, Yinv = [], []
        for b, Xk, Yk in zip(blocks, X, Y):
            if isinstance(b, _DenseBlock):
                try:
                    scal.append(_nt_scaling(Xk, Yk))
                    Yinv.append(linalg.inv(Yk))
                except (ValueError, linalg.LinAlgError) as exc:
                    raise NoInterior(f"scaling failed at iteration {it}: {exc}") from exc
            else:
                scal.append(Yk / Xk)
                Yinv.append(1.0 / Yk)

        B = np.zeros((m, m))
        for b, V in zip(blocks, scal):
            if isinstance(b, _DenseBlock):
                if not b.active.size:
                    continue
                sub = b.rows[b.active]
                for j, Fj in zip(b.active, b.mats):
                    W = V @ np.asarray(Fj @ V)
                    B[b.active, j] += np.asarray(sub @ W.ravel()).ravel()
            elif sparse.issparse(b.rows):
                B += np.asarray((b.rows.multiply(V[None, :]) @ b.rows.T).todense())
            else:
                B += (b.rows * V[None, :]) @ b.rows.T
        B = 0.5 * (B + B.T)
        if not np.all(np.isfinite(B)):
            raise NoInterior(f"Schur complement overflowed at iteration {it}; try perturbing the program slightly")
        try:
            factor = linalg.cho_factor(B)
            solve = lambda r: linalg.cho_solve(factor, r)  # noqa: E731
        except linalg.LinAlgError:
            solve = lambda r: np.linalg.lstsq(B, r, rcond=None)[0]  # noqa: E731

        def direction(sigma: float):
            R = [sigma * mu * Yi - Xk for Yi, Xk in zip(Yinv, X)]
            rhs = -d.copy()
            for b, V, Rk, Pk in zip(blocks, scal, R, P):
                if isinstance(b, _DenseBlock):
                    rhs += b.adjoint(V @ (Rk - Pk) @ V)
                else:
                    rhs += b.adjoint(V * (Rk - Pk))
            dx = solve(rhs)
            dX, dY = [], []
            for b, V, Rk, Pk in zip(blocks, scal, R, P):
                dXk = b.apply(dx) + Pk
                if isinstance(b, _DenseBlock):
                    dXk = 0.5 * (dXk + dXk.T)
                    dYk = V @ (Rk - dXk) @ V
                    dYk = 0.5 * (dYk + dYk.T)
                else:
                    dYk = V * (Rk - dXk)
                dX.append(dXk)
                dY.append(dYk)
            return dx, dX, dY

        def steps(dX, dY) -> Tuple[float, float]:
            if not all(np.all(np.isfinite(D)) for D in dX + dY):
                raise NoInterior(f"search direction overflowed at iteration {it}; try perturbing the program slightly")
            ap = min(
                _max_step_dense(Xk, dXk) if isinstance(b, _DenseBlock) else _max_step_diag(Xk, dXk)
                for b, Xk, dXk in zip(blocks, X, dX)
            )
            ad = min(
                _max_step_dense(Yk, dYk) if isinstance(b, _DenseBlock) else _max_step_diag(Yk, dYk)
                for b, Yk, dYk in zip(blocks, Y, dY)
            )
            return ap, ad

        _, dX_a, dY_a = direction(0.0)
        ap, ad = steps(dX_a, dY_a)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = inner([Xk + ap * d_ for Xk, d_ in zip(X, dX_a)], [Yk + ad * d_ for Yk, d_ in zip(Y, dY_a)]) / dim
        sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0)) if mu > 0 else 0.0

        dx, dX, dY = direction(sigma)
        ap, ad = steps(dX, dY)
        ap = min(1.0, cfg.step_fraction * ap)
        ad = min(1.0, cfg.step_fraction * ad)
        if max(ap, ad) < _STALL:
            raise NoInterior(
                f"step length stalled at iteration {it} (primal {ap:.1e}, dual {ad:.1e}); "
                "the program may lack a strictly feasible point, try perturbing it slightly"
            )
        x = x + ap * dx
        X = [Xk + ap * d_ for Xk, d_ in zip(X, dX)]
        Y = [Yk + ad * d_ for Yk, d_ in zip(Y, dY)]

    X_out = [Xk if isinstance(b, _DenseBlock) else np.asarray(Xk) for b, Xk in zip(blocks, X)]
    objective = problem.objective_value(x) if status in (OPTIMAL, MAXITER) else float("nan")
    if status == MAXITER:
        logger.warning("interior point method stopped after %d iterations (gap %.2e)", maxiter, gap)
        if strict:
            raise MaxIter(f"no convergence within {maxiter} iterations (gap {gap:.2e})")
    y_diag = [Yk for b, Yk in zip(blocks, Y) if isinstance(b, _DiagBlock)]
    return SolveResult(
        status=status,
        objective=objective,
        primal_objective=pobj,
        dual_objective=dobj,
        gap=gap,
        x=x,
        y=np.concatenate(y_diag) if y_diag else None,
        X=X_out,
        Y=Y,
        iterations=it,
        info={
            "dual_value": float(problem.objective_sign * dobj + problem.offset),
            "weak_duality_violations": weak_violations,
            "seconds": round(time.perf_counter() - started, 6),
        },
    )
