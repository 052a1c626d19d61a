from __future__ import annotations

from typing import Optional

import numpy as np
from scipy import linalg, sparse

from src.algebra.basis import AlgebraBasis
from src.errors import NotPSD


def psd_decompose(A, basis: Optional[AlgebraBasis] = None, tol: float = 1e-9) -> np.ndarray:
    """
    Hermitian B with B^* B = A.

    B is the spectral square root, i.e. p(A) for the interpolating polynomial
    with p(lambda) = sqrt(lambda) on the spectrum, so it lies in every
    algebra containing A. With a basis, A itself is checked for membership.
    """
    A = A.toarray() if sparse.issparse(A) else np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.conj().T).max() > tol * scale:
        raise ValueError("matrix is not Hermitian")
    if basis is not None:
        _, resid = basis.coordinates(A)
        if resid > max(tol, 1e-8):
            raise ValueError(f"matrix is not in the algebra (relative residual {resid:.2e})")

    w, U = linalg.eigh(0.5 * (A + A.conj().T))
    if w.size and w[0] < -tol * scale:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} is negative", float(w[0]))
    root = np.sqrt(np.clip(w, 0.0, None))
    B = (U * root) @ U.conj().T
    if not np.iscomplexobj(A):
        B = B.real
    return B
