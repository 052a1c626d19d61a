from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from src.groups.orbits import PairOrbitStructure


def _as_sparse(B) -> sparse.csr_matrix:
    if sparse.issparse(B):
        return sparse.csr_matrix(B)
    return sparse.csr_matrix(np.asarray(B))


@dataclass
class AlgebraBasis:
    """A basis B_0..B_{M-1} of a matrix *-algebra of n x n matrices, stored sparse."""
    n: int
    elements: List[sparse.csr_matrix]
    labels: List[str] = field(default_factory=list)
    _gram: Optional[tuple] = field(default=None, repr=False)
    _stacked: Optional[sparse.csr_matrix] = field(default=None, repr=False)

    def __post_init__(self):
        self.elements = [_as_sparse(B) for B in self.elements]
        for B in self.elements:
            if B.shape != (self.n, self.n):
                raise ValueError(f"basis element of shape {B.shape}, expected {(self.n, self.n)}")
        if not self.labels:
            self.labels = [f"B{r}" for r in range(len(self.elements))]

    @property
    def M(self) -> int:
        return len(self.elements)

    @property
    def is_real(self) -> bool:
        return all(not np.iscomplexobj(B.data) or not np.any(B.data.imag) for B in self.elements)

    @classmethod
    def from_dense(cls, mats: Sequence[np.ndarray], labels: Optional[List[str]] = None) -> "AlgebraBasis":
        mats = [np.asarray(A) for A in mats]
        return cls(mats[0].shape[0], [sparse.csr_matrix(A) for A in mats], labels or [])

    @classmethod
    def from_orbits(cls, orbits: PairOrbitStructure) -> "AlgebraBasis":
        """Canonical 0/1 basis C_r of the invariant algebra."""
        mats = [C.astype(float) for C in orbits.canonical_matrices()]
        return cls(orbits.n, mats, orbits.labels or [f"C{r}" for r in range(orbits.M)])

    @classmethod
    def from_json(cls, path: str | Path) -> "AlgebraBasis":
        """Sparse triplets per element: [i, j, re] or [i, j, re, im]."""
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        n = int(payload["n"])
        mats, labels = [], []
        for k, elem in enumerate(payload["elements"]):
            entries = elem["entries"] if isinstance(elem, dict) else elem
            rows = [int(e[0]) for e in entries]
            cols = [int(e[1]) for e in entries]
            vals = [complex(e[2], e[3] if len(e) > 3 else 0.0) for e in entries]
            mats.append(sparse.csr_matrix((vals, (rows, cols)), shape=(n, n)))
            labels.append(elem.get("label", f"B{k}") if isinstance(elem, dict) else f"B{k}")
        return cls(n, mats, labels)

    def to_json(self, path: str | Path) -> None:
        elements = []
        for label, B in zip(self.labels, self.elements):
            coo = B.tocoo()
            entries = []
            for i, j, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
                v = complex(v)
                entries.append([i, j, v.real] if v.imag == 0 else [i, j, v.real, v.imag])
            elements.append({"label": label, "entries": entries})
        Path(path).write_text(json.dumps({"n": self.n, "elements": elements}), encoding="utf-8")

    def dense(self, r: int) -> np.ndarray:
        return self.elements[r].toarray()

    def combination(self, coeffs: Sequence[complex]) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex if np.iscomplexobj(coeffs) or not self.is_real else float)
        for c, B in zip(coeffs, self.elements):
            if c != 0:
                out = out + c * B.toarray()
        return out

    def hermitian_generators(self) -> List[sparse.csr_matrix]:
        """B + B* and i(B - B*) for every element, dropping zeros; spans the Hermitian part."""
        herm = []
        for B in self.elements:
            Bh = B.conj().T.tocsr()
            for H in (B + Bh, 1j * (B - Bh)):
                H = H.tocsr()
                H.eliminate_zeros()
                if H.nnz and abs(H).max() > 0:
                    herm.append(H)
        return herm

    def _stacked_basis(self) -> sparse.csr_matrix:
        if self._stacked is None:
            cols = [B.reshape((self.n * self.n, 1)) for B in self.elements]
            self._stacked = sparse.hstack(cols, format="csr").astype(complex)
        return self._stacked

    def coordinates(self, Z) -> Tuple[np.ndarray, float]:
        """Least-squares coefficients of Z in the basis and the relative residual."""
        S = self._stacked_basis()
        if self._gram is None:
            G = (S.conj().T @ S).toarray()
            self._gram = linalg.cho_factor(G)
        z = np.asarray(Z.toarray() if sparse.issparse(Z) else Z, dtype=complex).reshape(-1)
        c = linalg.cho_solve(self._gram, S.conj().T @ z)
        resid = np.linalg.norm(S @ c - z)
        return c, float(resid / max(1.0, np.linalg.norm(z)))

    def closure_residual(self, max_pairs: int = 60, seed: int = 0) -> Tuple[float, float]:
        """Worst relative residual of products B_r B_s and adjoints B_r* outside the span."""
        M = self.M
        pairs = [(r, s) for r in range(M) for s in range(M)]
        if len(pairs) > max_pairs:
            rng = np.random.default_rng(seed)
            pairs = [pairs[k] for k in rng.choice(len(pairs), size=max_pairs, replace=False)]
        prod_err = 0.0
        for r, s in pairs:
            _, res = self.coordinates(self.elements[r] @ self.elements[s])
            prod_err = max(prod_err, res)
        adj_err = 0.0
        for B in self.elements:
            _, res = self.coordinates(B.conj().T)
            adj_err = max(adj_err, res)
        return prod_err, adj_err
