from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from src.algebra.basis import AlgebraBasis
from src.groups.orbits import StructureConstants

logger = logging.getLogger(__name__)

_EIGEN_SAMPLES = 5


@dataclass
class VerificationReport:
    multiplicativity_error: float
    adjoint_error: float
    dimension_ok: Optional[bool]
    eigenvalue_error: Optional[float]
    tol: float

    @property
    def max_error(self) -> float:
        errs = [self.multiplicativity_error, self.adjoint_error]
        if self.eigenvalue_error is not None:
            errs.append(self.eigenvalue_error)
        return float(max(errs))

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol and self.dimension_ok is not False

    def to_dict(self) -> Dict:
        out = asdict(self)
        out["max_error"] = self.max_error
        out["passed"] = self.passed
        return out


def _combine(images: Sequence[Sequence[np.ndarray]], coeffs: Sequence[complex]) -> List[np.ndarray]:
    out = [np.zeros(blk.shape, dtype=complex) for blk in images[0]]
    for c, blocks in zip(coeffs, images):
        if c != 0:
            for k, blk in enumerate(blocks):
                out[k] += c * blk
    return out


def _pairs(M: int, max_pairs: Optional[int], rng: np.random.Generator) -> List[tuple]:
    pairs = [(r, s) for r in range(M) for s in range(M)]
    if max_pairs is not None and len(pairs) > max_pairs:
        pairs = [pairs[k] for k in rng.choice(len(pairs), size=max_pairs, replace=False)]
    return pairs


def verify_star_isomorphism(
    images: Sequence[Sequence[np.ndarray]],
    *,
    structure: Optional[StructureConstants] = None,
    basis: Optional[AlgebraBasis] = None,
    multiplicities: Optional[Sequence[int]] = None,
    kernel_dim: int = 0,
    check_dimension: bool = True,
    tol: float = 1e-7,
    seed: int = 0,
    max_pairs: Optional[int] = None,
) -> VerificationReport:
    """
    Check that B_r -> images[r] (a tuple of blocks) respects products and adjoints.

    Products and adjoints of basis elements are expanded either through the
    structure constants or, given an explicit basis, by least squares in it.
    Errors are relative to the largest image norm. The eigenvalue check
    compares the spectrum of a random Hermitian combination with the spectra
    of its blocks, repeated by multiplicity (and padded with kernel zeros);
    without multiplicities only the sets of distinct eigenvalues are compared.
    """
    if structure is None and basis is None:
        raise ValueError("need structure constants or a basis to expand products")
    M = len(images)
    rng = np.random.default_rng(seed)
    scale = max(1.0, max(max(np.abs(blk).max() for blk in blocks) for blocks in images))

    if structure is not None:
        product = lambda r, s: structure.product_coordinates(r, s)  # noqa: E731
        adjoint = lambda r: np.eye(M)[int(structure.transpose_map[r])]  # noqa: E731
    else:
        product = lambda r, s: basis.coordinates(basis.elements[r] @ basis.elements[s])[0]  # noqa: E731
        adjoint = lambda r: basis.coordinates(basis.elements[r].conj().T)[0]  # noqa: E731

    mult_err = 0.0
    for r, s in _pairs(M, max_pairs, rng):
        rhs = _combine(images, product(r, s))
        for k, (A, B) in enumerate(zip(images[r], images[s])):
            mult_err = max(mult_err, float(np.abs(A @ B - rhs[k]).max()))
    mult_err /= scale

    adj_err = 0.0
    for r in range(M):
        rhs = _combine(images, adjoint(r))
        for k, A in enumerate(images[r]):
            adj_err = max(adj_err, float(np.abs(A.conj().T - rhs[k]).max()))
    adj_err /= scale

    dimension_ok = None
    if check_dimension:
        dimension_ok = sum(blk.shape[0] ** 2 for blk in images[0]) == M

    eig_err = None
    if basis is not None:
        eig_err = 0.0
        for _ in range(_EIGEN_SAMPLES):
            x = rng.standard_normal(M)
            X = basis.combination(x)
            X = 0.5 * (X + X.conj().T)
            blocks = _combine(images, x)
            blocks = [0.5 * (B + B.conj().T) for B in blocks]
            full = linalg.eigvalsh(X)
            parts = [linalg.eigvalsh(B) for B in blocks]
            xscale = max(1.0, float(np.abs(full).max()))
            if multiplicities is not None:
                mapped = np.concatenate(
                    [np.repeat(w, s) for w, s in zip(parts, multiplicities)] + [np.zeros(kernel_dim)]
                )
                if mapped.size != full.size:
                    eig_err = np.inf
                    break
                err = float(np.abs(np.sort(mapped) - full).max())
            else:
                mapped = np.concatenate(parts)
                # every eigenvalue of one side lies in the spectrum of the other
                d1 = np.abs(full[:, None] - mapped[None, :]).min(axis=1)
                d2 = np.abs(mapped[:, None] - full[None, :]).min(axis=1)
                if kernel_dim:
                    d1 = np.minimum(d1, np.abs(full))
                err = float(max(d1.max(), d2.max()))
            eig_err = max(eig_err, err / xscale)

    report = VerificationReport(
        multiplicativity_error=mult_err,
        adjoint_error=adj_err,
        dimension_ok=dimension_ok,
        eigenvalue_error=eig_err,
        tol=tol,
    )
    if not report.passed:
        logger.warning("*-isomorphism check failed: %s", report.to_dict())
    return report
