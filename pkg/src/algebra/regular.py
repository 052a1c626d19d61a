from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.groups.orbits import StructureConstants


@dataclass
class RegularRep:
    """
    Left regular *-representation in the orthonormalized canonical basis.

    L(C_r) = D P_r D^{-1} with P_r = sc.mult[r] (integer, P_r[s, t] = p^s_{rt})
    and D = diag(||C_s||). Keeping P_r and the squared norms exact lets the
    multiplicativity law be checked in integer arithmetic.
    """
    sc: StructureConstants

    @property
    def M(self) -> int:
        return self.sc.M

    @property
    def norms(self) -> np.ndarray:
        return self.sc.norms

    def sparse_matrix(self, r: int) -> sparse.csr_matrix:
        D = sparse.diags(self.norms)
        Dinv = sparse.diags(1.0 / self.norms)
        return (D @ self.sc.mult[r].astype(float) @ Dinv).tocsr()

    def matrix(self, r: int) -> np.ndarray:
        return self.sparse_matrix(r).toarray()

    @property
    def L(self) -> List[np.ndarray]:
        return [self.matrix(r) for r in range(self.M)]

    def image(self, coeffs: Sequence[float]) -> np.ndarray:
        """L(sum_r c_r C_r)."""
        out = sparse.csr_matrix((self.M, self.M))
        for r, c in enumerate(coeffs):
            if c != 0:
                out = out + c * self.sc.mult[r].astype(complex if np.iscomplexobj(c) else float)
        D = self.norms
        return (out.toarray() * D[:, None]) / D[None, :]

    def entry_exact(self, r: int, s: int, t: int) -> Tuple[int, Fraction]:
        """L(C_r)[s, t] as (p, q) meaning p * sqrt(q), q = |R_s| / |R_t|."""
        p = int(self.sc.mult[r][s, t])
        return p, Fraction(int(self.sc.orbit_sizes[s]), int(self.sc.orbit_sizes[t]))

    def exact_multiplicativity_error(self, pairs: Optional[Iterable[Tuple[int, int]]] = None) -> int:
        """max |P_r P_s - sum_t p^t_{rs} P_t| over the given pairs, in integers (0 for a valid table)."""
        M = self.M
        mult = [P.astype(np.int64) for P in self.sc.mult]
        if pairs is None:
            pairs = ((r, s) for r in range(M) for s in range(M))
        worst = 0
        for r, s in pairs:
            lhs = mult[r] @ mult[s]
            col = mult[r][:, [s]].tocoo()
            rhs = sparse.csr_matrix((M, M), dtype=np.int64)
            for t, p in zip(col.row.tolist(), col.data.tolist()):
                rhs = rhs + int(p) * mult[t]
            diff = (lhs - rhs).tocsr()
            if diff.nnz:
                worst = max(worst, int(abs(diff).max()))
        return worst


def regular_rep(sc: StructureConstants) -> RegularRep:
    return RegularRep(sc)
