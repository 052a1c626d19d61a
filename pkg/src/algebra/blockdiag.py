"""
Numerical block diagonalization of a matrix *-algebra.

A seeded random Hermitian element A of the algebra is diagonalized. For a
generic sample its spectral projections are minimal projections of the
algebra, so every basis element compresses to a scalar on each eigenspace.
Two eigenspaces belong to the same simple component exactly when some basis
element has a nonzero block between them; within a component the blocks
between the first eigenspace and the others are multiples of unitaries and
are used to align the eigenspaces. The images of the basis elements are
then read off as the scalars of the aligned blocks.

A sample is generic exactly when its eigenvalue clusters number the dimension
of the commutative algebra it generates (the Gram rank of I, A, A^2, ...) and
that dimension is the sum of the block sizes. Testing that every basis element
is scalar on every eigenspace is the same condition: a non-scalar compression
means some cluster merges eigenvalues of a maximal abelian subalgebra. A
failed test retries with the next seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from src.algebra.basis import AlgebraBasis
from src.config import AlgebraConfig
from src.errors import DegenerateSample, NotAnAlgebra

logger = logging.getLogger(__name__)

_GENERICITY_TOL = 1e-6


@dataclass
class BlockDiagonalization:
    """
    A *-isomorphism phi from the algebra onto a direct sum of full matrix algebras.

    images[r][k] is phi_k(B_r), an m_k x m_k complex block. frames[k][u] is the
    n x s_k matrix P_u of the u-th aligned eigenspace of component k, so that
    phi_k(Z)[u, v] = tr(P_u^* Z P_v) / s_k and phi^{-1}(E_{k,uv}) = P_u P_v^*.
    """
    n: int
    M: int
    block_sizes: List[int]
    multiplicities: List[int]
    images: List[List[np.ndarray]]
    frames: List[List[np.ndarray]]
    kernel_dim: int
    seed: int
    residual: float = float("nan")
    report: Optional[object] = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return len(self.block_sizes)

    def image(self, Z) -> List[np.ndarray]:
        """phi(Z) for any matrix Z of the algebra, through the stored frames."""
        Z = Z.toarray() if sparse.issparse(Z) else np.asarray(Z)
        blocks = []
        for k, frames in enumerate(self.frames):
            s = self.multiplicities[k]
            ZP = [Z @ P for P in frames]
            m = len(frames)
            out = np.empty((m, m), dtype=complex)
            for u, Pu in enumerate(frames):
                Pu_h = Pu.conj().T
                for v in range(m):
                    out[u, v] = np.trace(Pu_h @ ZP[v]) / s
            blocks.append(out)
        return blocks

    def image_of_coefficients(self, coeffs: Sequence[complex]) -> List[np.ndarray]:
        """phi(sum_r c_r B_r) from the stored images."""
        out = [np.zeros((m, m), dtype=complex) for m in self.block_sizes]
        for c, blocks in zip(coeffs, self.images):
            if c != 0:
                for k, blk in enumerate(blocks):
                    out[k] += c * blk
        return out

    def matrix_unit_preimage(self, k: int, u: int, v: int) -> np.ndarray:
        return self.frames[k][u] @ self.frames[k][v].conj().T

    def preimage(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """phi^{-1} of a tuple of blocks."""
        out = np.zeros((self.n, self.n), dtype=complex)
        for k, X in enumerate(blocks):
            frames = self.frames[k]
            for u, Pu in enumerate(frames):
                for v, Pv in enumerate(frames):
                    if X[u, v] != 0:
                        out += X[u, v] * (Pu @ Pv.conj().T)
        return out

    def block_is_real(self, k: int, tol: float = 1e-10) -> bool:
        scale = max(1.0, max(np.abs(blocks[k]).max() for blocks in self.images))
        return all(np.abs(blocks[k].imag).max() <= tol * scale for blocks in self.images)

    def summary(self) -> Dict:
        return {
            "d": self.d,
            "block_sizes": list(self.block_sizes),
            "multiplicities": list(self.multiplicities),
            "kernel_dim": self.kernel_dim,
            "seed": self.seed,
            "residual": self.residual,
        }


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _range_basis(basis: AlgebraBasis) -> Tuple[np.ndarray, int]:
    """Orthonormal basis of the subspace where the algebra acts nontrivially, and the kernel dimension."""
    n = basis.n
    K = np.zeros((n, n), dtype=float if basis.is_real else complex)
    for B in basis.elements:
        Bh = B.conj().T
        K += (B @ Bh).toarray() + (Bh @ B).toarray()
    w, U = linalg.eigh(K)
    cut = 1e-10 * max(1.0, float(np.abs(w).max()))
    keep = w > cut
    kernel_dim = int(n - keep.sum())
    if kernel_dim == 0:
        return np.eye(n), 0
    return U[:, keep], kernel_dim


def _clusters(w: np.ndarray, gap: float) -> List[slice]:
    thr = gap * max(float(np.abs(w).max()), np.finfo(float).tiny)
    breaks = np.flatnonzero(np.diff(w) > thr) + 1
    edges = np.concatenate([[0], breaks, [w.size]])
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def _block_norms(Bp: np.ndarray, starts: np.ndarray) -> np.ndarray:
    sq = np.abs(Bp) ** 2
    return np.sqrt(np.add.reduceat(np.add.reduceat(sq, starts, axis=0), starts, axis=1))


class _Conjugator:
    """Q^* B_r Q on demand; cached while the whole set fits in memory."""

    _CACHE_LIMIT = 20_000_000

    def __init__(self, basis: AlgebraBasis, Q: np.ndarray):
        self.basis = basis
        self.Q = Q
        self.Qh = Q.conj().T
        self.cache: Optional[Dict[int, np.ndarray]] = (
            {} if basis.M * Q.shape[1] ** 2 <= self._CACHE_LIMIT else None
        )

    def __call__(self, r: int) -> np.ndarray:
        if self.cache is not None and r in self.cache:
            return self.cache[r]
        out = self.Qh @ (self.basis.elements[r] @ self.Q)
        if self.cache is not None:
            self.cache[r] = out
        return out


def _real_generators(basis: AlgebraBasis) -> List[sparse.csr_matrix]:
    out = []
    for B in basis.elements:
        H = (B + B.T).real.tocsr()
        H.eliminate_zeros()
        if H.nnz:
            out.append(H)
    return out


def _attempt(
    basis: AlgebraBasis,
    seed: int,
    cfg: AlgebraConfig,
    Q_range: np.ndarray,
    kernel_dim: int,
    real: bool = False,
) -> BlockDiagonalization:
    rng = np.random.default_rng(seed)
    herm = _real_generators(basis) if real else basis.hermitian_generators()
    coeffs = rng.standard_normal(len(herm))
    A = np.zeros((basis.n, basis.n), dtype=float if real else complex)
    for a, H in zip(coeffs, herm):
        A += a * H.toarray()
    A = Q_range.conj().T @ A @ Q_range
    A = 0.5 * (A + A.conj().T)
    w, U = linalg.eigh(A)
    Q = Q_range @ U
    clusters = _clusters(w, cfg.cluster_gap)
    sizes = np.array([c.stop - c.start for c in clusters])
    starts = np.array([c.start for c in clusters])
    p = len(clusters)

    conjugated = _Conjugator(basis, Q)
    norms = np.zeros((p, p))
    for r in range(basis.M):
        Bp = conjugated(r)
        scale = max(np.linalg.norm(Bp), np.finfo(float).tiny)
        for c in clusters:
            D = Bp[c, c]
            mu = np.trace(D) / D.shape[0]
            if np.linalg.norm(D - mu * np.eye(D.shape[0])) > _GENERICITY_TOL * scale:
                raise DegenerateSample(f"seed {seed}: eigenspace of size {D.shape[0]} is not minimal")
        bn = _block_norms(Bp, starts) / scale
        norms = np.maximum(norms, bn)

    related = norms > cfg.offdiag_threshold * max(norms.max(), np.finfo(float).tiny)
    uf = _UnionFind(p)
    for i, j in zip(*np.nonzero(np.triu(related, 1))):
        uf.union(int(i), int(j))
    classes: Dict[int, List[int]] = {}
    for i in range(p):
        classes.setdefault(uf.find(i), []).append(i)
    components = [classes[root] for root in sorted(classes)]

    block_sizes, multiplicities, frames = [], [], []
    for comp in components:
        s = int(sizes[comp[0]])
        if any(int(sizes[c]) != s for c in comp):
            raise DegenerateSample(f"seed {seed}: eigenspaces of unequal size in one component")

    # Strongest block between the first eigenspace of each component and the others.
    best: Dict[Tuple[int, int], Tuple[float, np.ndarray]] = {}
    for r in range(basis.M):
        Bp = conjugated(r)
        for comp in components:
            c1 = clusters[comp[0]]
            for cu_idx in comp[1:]:
                T = Bp[c1, clusters[cu_idx]]
                sv = float(linalg.svdvals(T)[-1])
                if sv > best.get((comp[0], cu_idx), (-1.0, None))[0]:
                    best[(comp[0], cu_idx)] = (sv, T)

    for comp in components:
        s = int(sizes[comp[0]])
        comp_frames = [Q[:, clusters[comp[0]]]]
        for cu_idx in comp[1:]:
            T = best[(comp[0], cu_idx)][1]
            V = T / np.sqrt(np.linalg.norm(T) ** 2 / s)
            if np.linalg.norm(V @ V.conj().T - np.eye(s)) > 1e-6:
                raise DegenerateSample(f"seed {seed}: alignment block is not a multiple of a unitary")
            comp_frames.append(Q[:, clusters[cu_idx]] @ V.conj().T)
        block_sizes.append(len(comp))
        multiplicities.append(s)
        frames.append(comp_frames)

    if sum(m * m for m in block_sizes) != basis.M:
        raise DegenerateSample(
            f"seed {seed}: sum of squared block sizes {sum(m * m for m in block_sizes)} != dimension {basis.M}"
        )

    # V_u and Q are folded into the frames; images are the aligned block scalars.
    images: List[List[np.ndarray]] = []
    aligned = [[(Q.conj().T @ P) for P in comp_frames] for comp_frames in frames]
    for r in range(basis.M):
        Bp = conjugated(r)
        blocks = []
        for k, comp_frames in enumerate(aligned):
            s = multiplicities[k]
            m = len(comp_frames)
            blk = np.empty((m, m), dtype=complex)
            for u, Gu in enumerate(comp_frames):
                left = Gu.conj().T @ Bp
                for v, Gv in enumerate(comp_frames):
                    blk[u, v] = np.trace(left @ Gv) / s
            blocks.append(blk)
        images.append(blocks)

    return BlockDiagonalization(
        n=basis.n,
        M=basis.M,
        block_sizes=block_sizes,
        multiplicities=multiplicities,
        images=images,
        frames=frames,
        kernel_dim=kernel_dim,
        seed=seed,
    )


def block_diagonalize(
    basis: AlgebraBasis,
    seed: int = 1,
    tol: float = 1e-9,
    config: Optional[AlgebraConfig] = None,
) -> BlockDiagonalization:
    """Block-diagonalize span(basis); retries with seed+1, seed+2, ... on degenerate samples."""
    from src.algebra.verify import verify_star_isomorphism

    cfg = config or AlgebraConfig()
    prod_err, adj_err = basis.closure_residual(seed=seed)
    if max(prod_err, adj_err) > max(1e-8, 10 * tol):
        raise NotAnAlgebra(f"span is not closed: product residual {prod_err:.2e}, adjoint residual {adj_err:.2e}")

    Q_range, kernel_dim = _range_basis(basis)
    if kernel_dim:
        logger.info("algebra has no identity: %d-dimensional common kernel emitted as a zero block", kernel_dim)

    # Real bases first try a real symmetric sample, which keeps real-type blocks real.
    plan = [(seed, True)] if basis.is_real else []
    plan += [(seed + attempt, False) for attempt in range(cfg.max_retries)]
    last: Optional[DegenerateSample] = None
    for sample_seed, real in plan:
        try:
            bd = _attempt(basis, sample_seed, cfg, Q_range, kernel_dim, real=real)
        except DegenerateSample as exc:
            if real:
                logger.info("real sample is not generic (%s); using complex Hermitian samples", exc)
            else:
                logger.warning("degenerate sample (%s); retrying", exc)
            last = exc
            continue
        report = verify_star_isomorphism(
            bd.images,
            basis=basis,
            multiplicities=bd.multiplicities,
            kernel_dim=kernel_dim,
            tol=cfg.verify_tol,
            seed=seed,
        )
        bd.report = report
        bd.residual = report.max_error
        return bd
    raise DegenerateSample(f"no generic sample after {cfg.max_retries} seeds: {last}")
