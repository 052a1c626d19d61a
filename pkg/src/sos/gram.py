"""
Symmetry-adapted Gram SDP for sums of squares.

p = z^T X z with X psd over the monomials z of degree <= d. For p invariant
under a finite group, X may be averaged to pi(g) X pi(g)^T = X. With pi
orthogonal in a basis R (pi' = R pi R^{-1}, X = R^{-1} Y R^{-T}) the
averaged Y lies in the commutant of pi', a matrix *-algebra, and its psd
constraint splits into the blocks of that algebra.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from src.algebra.basis import AlgebraBasis
from src.algebra.blockdiag import BlockDiagonalization, block_diagonalize
from src.algebra.psd import psd_decompose
from src.config import AppConfig
from src.errors import Infeasible, NotInvariant, NotPSD, NoInterior, TooLarge
from src.sdp.problem import LinearSDPBuilder
from src.solver.result import OPTIMAL
from src.solver.sdp import solve_sdp
from src.sos.monomial_rep import MonomialRep, enumerate_group, is_invariant, monomial_rep
from src.sos.polynomial import Exponent, Polynomial, monomials, product_index

logger = logging.getLogger(__name__)


@dataclass
class Commutant:
    """Basis of {Y : pi'(g) Y = Y pi'(g)} for the orthogonalized pi' = R pi R^{-1}."""
    basis: List[np.ndarray]
    symmetric: List[np.ndarray]
    R: np.ndarray
    method: str

    @property
    def dim(self) -> int:
        return len(self.basis)


def _orth_columns(V: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if V.shape[1] == 0:
        return V
    return linalg.orth(V, rcond=tol)


def commutant(rep: MonomialRep, max_group_order: int = 10_000, tol: float = 1e-8) -> Commutant:
    """
    Commutant of the monomial representation.

    Small groups are enumerated: an invariant inner product orthogonalizes pi
    and the commutant is the range of the Reynolds operator on matrix units.
    Otherwise pi must already be orthogonal and the commutant is the null
    space of the commutation equations of the generators.
    """
    N = rep.size
    try:
        enumerate_group(rep, max_group_order)
    except TooLarge:
        rep.elements = rep.element_matrices = None

    if rep.element_matrices is not None:
        Pi = np.array(rep.element_matrices)
        S = np.einsum("gai,gaj->ij", Pi, Pi) / Pi.shape[0]
        R = linalg.cholesky(0.5 * (S + S.T))
        Rinv = linalg.solve_triangular(R, np.eye(N))
        Pi = R @ Pi @ Rinv
        P = np.zeros((N * N, N * N))
        for Q in Pi:
            P += np.kron(Q, Q)
        P /= Pi.shape[0]
        V = _orth_columns(P, tol)
        method = "reynolds"
    else:
        if not rep.is_orthogonal(tol):
            raise TooLarge(
                f"group exceeds {max_group_order} elements and its monomial representation is not orthogonal"
            )
        R = np.eye(N)
        I = np.eye(N)
        # vec(P Y - Y P) = (I kron P - P^T kron I) vec(Y), column-major vec
        system = np.vstack([np.kron(I, Q) - np.kron(Q.T, I) for Q in rep.matrices]) if rep.matrices else np.zeros((1, N * N))
        V = linalg.null_space(system, rcond=tol)
        # back to row-major flattening
        V = V.reshape(N, N, -1).transpose(1, 0, 2).reshape(N * N, -1)
        method = "nullspace"

    basis = [V[:, k].reshape(N, N) for k in range(V.shape[1])]
    sym = np.array([0.5 * (B + B.T).ravel() for B in basis]).T
    Vs = _orth_columns(sym, tol)
    symmetric = [Vs[:, k].reshape(N, N) for k in range(Vs.shape[1])]
    for k, Y in enumerate(symmetric):
        symmetric[k] = 0.5 * (Y + Y.T)
    logger.info("commutant of dimension %d (%d symmetric) on %d monomials via %s", len(basis), len(symmetric), N, method)
    return Commutant(basis=basis, symmetric=symmetric, R=R, method=method)


@dataclass
class SOSCertificate:
    """p = sum_i q_i^2 with the Gram matrix X and the block structure used to find it."""
    p: Polynomial
    d: int
    monomials: List[Exponent]
    gram: np.ndarray
    squares: List[Polynomial]
    margin: float
    error: float
    block_sizes: List[int] = field(default_factory=list)
    multiplicities: List[int] = field(default_factory=list)
    reduced: bool = True

    def to_dict(self) -> dict:
        return {
            "feasible": True,
            "d": self.d,
            "gram_size": len(self.monomials),
            "block_sizes": list(self.block_sizes),
            "multiplicities": list(self.multiplicities),
            "reduced": self.reduced,
            "margin": float(self.margin),
            "error": float(self.error),
            "squares": [q.to_json() for q in self.squares],
        }


def coefficient_map(n: int, d: int) -> Tuple[np.ndarray, int]:
    idx = product_index(n, d)
    return idx, len(monomials(n, 2 * d))


def gram_coefficients(X: np.ndarray, n: int, d: int) -> np.ndarray:
    """Coefficients of z^T X z over the monomials of degree <= 2d."""
    idx, K = coefficient_map(n, d)
    return np.bincount(idx.ravel(), weights=np.asarray(X, dtype=float).ravel(), minlength=K)


def _degree(p: Polynomial, d: Optional[int]) -> int:
    if p.is_zero():
        raise ValueError("the zero polynomial needs no certificate")
    if d is None:
        if p.degree % 2:
            raise ValueError(f"p has odd degree {p.degree}")
        return p.degree // 2
    if 2 * d < p.degree:
        raise ValueError(f"half-degree {d} too small for p of degree {p.degree}")
    return d


def _gram_program(
    rows: np.ndarray,
    target: np.ndarray,
    blocks: List[List[np.ndarray]],
    identities: List[np.ndarray],
) -> LinearSDPBuilder:
    """max t  s.t.  rows y = target,  sum_l y_l B_kl - t I_k >= 0 for every block k,  t <= 1."""
    L = rows.shape[1]
    builder = LinearSDPBuilder(L + 1, [f"y{l}" for l in range(L)] + ["t"])
    objective = np.zeros(L + 1)
    objective[L] = 1.0
    builder.set_objective(objective, maximize=True)
    for row, rhs in zip(rows, target):
        builder.add_equality(np.append(row, 0.0), rhs)
    builder.add_inequality({L: -1.0}, -1.0)
    for k, mats in enumerate(blocks):
        terms = {l: B for l, B in enumerate(mats)}
        terms[L] = -identities[k]
        builder.add_lmi(terms, label=f"block{k}")
    return builder


def sos_gram_sdp(
    p: Polynomial,
    generators: Optional[Sequence] = None,
    d: Optional[int] = None,
    seed: Optional[int] = None,
    reduce: bool = True,
    config: Optional[AppConfig] = None,
) -> SOSCertificate:
    """
    Decide whether p is a sum of squares of polynomials of degree <= d and
    return the squares. Raises NotInvariant when p is not invariant under the
    generators and Infeasible (with a separating functional when one is
    found) when p is not a sum of squares.
    """
    cfg = config or AppConfig()
    seed = cfg.seed if seed is None else seed
    d = _degree(p, d)
    n = p.n
    generators = list(generators or [])
    bad = is_invariant(p, generators, seed=seed, tol=cfg.sos.invariance_tol)
    if bad is not None:
        raise NotInvariant(f"p is not invariant under generator {bad}", generator=bad)

    basis_monomials = monomials(n, d)
    N = len(basis_monomials)
    idx, K = coefficient_map(n, d)
    target = p.vector(2 * d)

    bd: Optional[BlockDiagonalization] = None
    if reduce and generators:
        rep = monomial_rep(generators, n, d)
        comm = commutant(rep, cfg.sos.max_group_order, cfg.sos.invariance_tol)
        R = comm.R
        sym = comm.symmetric
        bd = block_diagonalize(AlgebraBasis.from_dense(comm.basis), seed=seed, config=cfg.algebra)
        images = [bd.image(S) for S in sym]
        block_mats = [[img[k] for img in images] for k in range(bd.d)]
        identities = [np.eye(m) for m in bd.block_sizes]
    else:
        R = np.eye(N)
        iu, ju = np.triu_indices(N)
        sym = []
        for i, j in zip(iu, ju):
            E = np.zeros((N, N))
            E[i, j] = E[j, i] = 1.0
            sym.append(E)
        block_mats = [sym]
        identities = [np.eye(N)]

    Rinv = linalg.solve_triangular(R, np.eye(N)) if reduce and generators else np.eye(N)
    gram_of = [Rinv @ S @ Rinv.T for S in sym]
    rows = np.array([np.bincount(idx.ravel(), weights=G.ravel(), minlength=K) for G in gram_of]).T

    builder = _gram_program(rows, target, block_mats, identities)
    try:
        problem = builder.build()
        result = solve_sdp(problem, config=cfg.solver)
    except (Infeasible, NoInterior) as exc:
        logger.info("Gram program has no solution (%s)", exc)
        _raise_infeasible(p, d, cfg, f"no Gram matrix matches the coefficients of p ({exc})")
    v = problem.lifted(result.x) if result.x is not None else None
    margin = float(v[-1]) if v is not None else float("-inf")
    if result.status != OPTIMAL and margin < -cfg.sos.infeasible_margin:
        logger.warning("Gram program ended with status %s", result.status)
    if margin < -cfg.sos.infeasible_margin:
        _raise_infeasible(p, d, cfg, f"largest Gram margin {margin:.3e} is negative")

    y = v[:-1]
    psd_tol = max(cfg.sos.certificate_tol, 10 * cfg.sos.infeasible_margin)
    Y = sum(c * S for c, S in zip(y, sym))
    if bd is not None:
        columns = []
        for k, block in enumerate(bd.image(Y)):
            W = psd_decompose(block, tol=psd_tol)
            frame = np.hstack(bd.frames[k])
            columns.append(frame @ np.kron(W, np.eye(bd.multiplicities[k])))
        G = np.hstack(columns)
    else:
        G = psd_decompose(Y, tol=psd_tol)
    G = Rinv @ G
    vecs = [G[:, j].real for j in range(G.shape[1])] + [G[:, j].imag for j in range(G.shape[1]) if np.iscomplexobj(G)]
    scale = max(1.0, max((np.abs(c).max() for c in vecs), default=0.0))
    vecs = [c for c in vecs if np.abs(c).max() > 1e-12 * scale]
    X = sum((np.outer(c, c) for c in vecs), np.zeros((N, N)))
    error = float(np.abs(gram_coefficients(X, n, d) - target).max())
    bound = cfg.sos.certificate_tol * (1.0 + p.max_abs_coefficient())
    if error > bound:
        raise NotPSD(f"reconstructed squares miss p by {error:.3e} (allowed {bound:.3e})", margin)
    squares = [Polynomial.from_vector(c, n, d, tol=1e-12 * scale) for c in vecs]
    logger.info("SOS certificate with %d squares, coefficient error %.2e", len(squares), error)
    return SOSCertificate(
        p=p,
        d=d,
        monomials=basis_monomials,
        gram=X,
        squares=squares,
        margin=margin,
        error=error,
        block_sizes=list(bd.block_sizes) if bd is not None else [N],
        multiplicities=list(bd.multiplicities) if bd is not None else [1],
        reduced=bd is not None,
    )


# -- infeasibility --------------------------------------------------------


def separating_functional(p: Polynomial, d: int, config: Optional[AppConfig] = None) -> Tuple[np.ndarray, float]:
    """
    min l(p)  s.t.  the moment matrix [l(z_a z_b)] is psd with trace 1.

    A negative value gives a linear functional l on polynomials of degree
    <= 2d with l(q^2) >= 0 for every q and l(p) < 0.
    """
    cfg = config or AppConfig()
    idx, K = coefficient_map(p.n, d)
    N = idx.shape[0]
    target = p.vector(2 * d)
    builder = LinearSDPBuilder(K, [f"l{b}" for b in range(K)])
    builder.set_objective(target, maximize=False)
    builder.add_equality(np.bincount(np.diag(idx), minlength=K).astype(float), 1.0)
    terms = {}
    for b in np.unique(idx):
        terms[int(b)] = (idx == b).astype(float)
    builder.add_lmi(terms, label="moments")
    problem = builder.build()
    result = solve_sdp(problem, config=cfg.solver)
    ell = problem.lifted(result.x)
    return ell, float(ell @ target)


def verify_separating_functional(ell: Sequence[float], p: Polynomial, d: int, tol: float = 1e-9) -> bool:
    """Moment matrix of ell psd (up to tol) and ell(p) < 0, checked directly from the numbers."""
    ell = np.asarray(ell, dtype=float)
    idx, K = coefficient_map(p.n, d)
    if ell.size != K:
        raise ValueError(f"functional of length {ell.size}, expected {K}")
    Mom = ell[idx]
    lam = float(np.linalg.eigvalsh(0.5 * (Mom + Mom.T))[0])
    value = float(ell @ p.vector(2 * d))
    scale = max(1.0, float(np.abs(Mom).max()))
    return lam >= -tol * scale and value < -tol * scale


def _raise_infeasible(p: Polynomial, d: int, cfg: AppConfig, message: str):
    ell, value = separating_functional(p, d, cfg)
    verified = verify_separating_functional(ell, p, d, tol=cfg.sos.certificate_tol)
    positions = monomials(p.n, 2 * d)
    certificate: Dict[str, object] = {
        "functional": {",".join(map(str, e)): float(v) for e, v in zip(positions, ell)},
        "value": value,
        "verified": verified,
    }
    raise Infeasible(f"p is not a sum of squares at degree {2 * d}: {message}", certificate=certificate)


# -- rational rounding ----------------------------------------------------


@dataclass
class RationalCertificate:
    """p = sum_i w_i q_i^2 exactly, with rational weights w_i > 0 and rational q_i."""
    weights: List[Fraction]
    squares: List[Polynomial]
    gram: List[List[Fraction]]

    def expand(self, n: int) -> Polynomial:
        total = Polynomial(n)
        for w, q in zip(self.weights, self.squares):
            total = total + (q * q) * w
        return total


def _ldl(A: List[List[Fraction]]) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """A = sum_k w_k l_k l_k^T with w_k > 0, exact; NotPSD if A is not psd."""
    N = len(A)
    A = [row[:] for row in A]
    weights, vectors = [], []
    for k in range(N):
        piv = A[k][k]
        if piv < 0:
            raise NotPSD(f"negative pivot {piv} at {k}", float(piv))
        if piv == 0:
            if any(A[k][j] != 0 for j in range(k, N)):
                raise NotPSD(f"zero pivot with nonzero row at {k}", 0.0)
            continue
        l = [Fraction(0)] * N
        for j in range(k, N):
            l[j] = A[k][j] / piv
        for i in range(k, N):
            if l[i] == 0:
                continue
            for j in range(k, N):
                A[i][j] -= piv * l[i] * l[j]
        weights.append(piv)
        vectors.append(l)
    return weights, vectors


def rationalize_certificate(cert: SOSCertificate, max_denominator: int = 1000) -> RationalCertificate:
    """
    Round the Gram matrix to rationals, project it exactly onto the affine
    space of Gram matrices of p, and factor it exactly; NotPSD when the
    rounded matrix is not psd.
    """
    n, d = cert.p.n, cert.d
    idx, K = coefficient_map(n, d)
    N = idx.shape[0]
    X = [[Fraction(float(cert.gram[i, j])).limit_denominator(max_denominator) for j in range(N)] for i in range(N)]
    for i in range(N):
        for j in range(i + 1, N):
            X[j][i] = X[i][j]
    positions = monomials(n, 2 * d)
    target = [Fraction(0)] * K
    for e, c in cert.p.terms.items():
        target[positions.index(e)] = Fraction(c)
    count = [0] * K
    have = [Fraction(0)] * K
    for i in range(N):
        for j in range(N):
            b = int(idx[i, j])
            count[b] += 1
            have[b] += X[i][j]
    for i in range(N):
        for j in range(N):
            b = int(idx[i, j])
            X[i][j] += (target[b] - have[b]) / count[b]
    weights, vectors = _ldl(X)
    squares = [Polynomial.from_vector(v, n, d) for v in vectors]
    out = RationalCertificate(weights=weights, squares=squares, gram=X)
    if out.expand(n) != cert.p:
        raise NotPSD("rounded certificate does not reproduce p", 0.0)
    return out
