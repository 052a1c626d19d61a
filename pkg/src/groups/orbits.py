from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.errors import RepresentativeMismatch
from src.groups.permutation import GroupAction

logger = logging.getLogger(__name__)


@dataclass
class PairOrbitStructure:
    """
    Orbits R_0..R_{M-1} of a group acting on ordered pairs of [n].

    orbit_id is the n x n label array. It may be None for structures built
    implicitly (large crossing instances), in which case only the per-orbit
    data is available.
    """
    n: int
    M: int
    orbit_sizes: np.ndarray
    transpose_map: np.ndarray
    representatives: List[Tuple[int, int]]
    orbit_id: Optional[np.ndarray] = None
    labels: Optional[List[str]] = None
    _classes: Optional[List[Tuple[int, ...]]] = field(default=None, repr=False)

    def require_explicit(self) -> np.ndarray:
        if self.orbit_id is None:
            raise ValueError("orbit structure has no explicit n x n orbit_id")
        return self.orbit_id

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(self.orbit_sizes.astype(float))

    def diagonal_orbits(self) -> List[int]:
        return [r for r, (i, j) in enumerate(self.representatives) if i == j]

    def identity_coordinates(self) -> np.ndarray:
        x = np.zeros(self.M)
        x[self.diagonal_orbits()] = 1.0
        return x

    def symmetric_classes(self) -> List[Tuple[int, ...]]:
        """Each orbit paired with its transpose, ordered by smallest member."""
        if self._classes is None:
            classes = []
            for r in range(self.M):
                tr = int(self.transpose_map[r])
                if tr == r:
                    classes.append((r,))
                elif r < tr:
                    classes.append((r, tr))
            self._classes = classes
        return self._classes

    def class_index(self) -> np.ndarray:
        idx = np.empty(self.M, dtype=np.int64)
        for c, members in enumerate(self.symmetric_classes()):
            idx[list(members)] = c
        return idx

    def canonical_matrix(self, r: int) -> sparse.csr_matrix:
        O = self.require_explicit()
        rows, cols = np.nonzero(O == r)
        return sparse.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(self.n, self.n))

    def canonical_matrices(self) -> List[sparse.csr_matrix]:
        O = self.require_explicit().ravel()
        order = np.argsort(O, kind="stable")
        bounds = np.concatenate([[0], np.cumsum(self.orbit_sizes)])
        mats = []
        for r in range(self.M):
            flat = order[bounds[r]:bounds[r + 1]]
            rows, cols = np.divmod(flat, self.n)
            mats.append(sparse.csr_matrix((np.ones(flat.size, dtype=np.int64), (rows, cols)), shape=(self.n, self.n)))
        return mats

    def coordinates(self, X: np.ndarray) -> np.ndarray:
        """x_r = <C_r, X> / |R_r|, the mean of X over each orbit."""
        O = self.require_explicit()
        X = np.asarray(X)
        if X.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix, got {X.shape}")
        flat = O.ravel()
        if np.iscomplexobj(X):
            re = np.bincount(flat, weights=X.real.ravel(), minlength=self.M)
            im = np.bincount(flat, weights=X.imag.ravel(), minlength=self.M)
            return (re + 1j * im) / self.orbit_sizes
        return np.bincount(flat, weights=X.ravel(), minlength=self.M) / self.orbit_sizes

    def from_coordinates(self, x: Sequence[float]) -> np.ndarray:
        return np.asarray(x)[self.require_explicit()]


def pair_orbits(action: GroupAction) -> PairOrbitStructure:
    """BFS closure of ordered pairs under the generators; ids in lexicographic first-encounter order."""
    n = action.n
    G = action.generator_array()
    flat = np.full(n * n, -1, dtype=np.int64)
    sizes: List[int] = []
    reps: List[Tuple[int, int]] = []
    pos = 0
    while True:
        rest = np.flatnonzero(flat[pos:] < 0)
        if rest.size == 0:
            break
        start = pos + int(rest[0])
        pos = start
        r = len(sizes)
        flat[start] = r
        count = 1
        fi, fj = np.divmod(np.array([start]), n)
        while fi.size and G.shape[0]:
            codes = np.unique((G[:, fi] * n + G[:, fj]).ravel())
            codes = codes[flat[codes] < 0]
            flat[codes] = r
            count += codes.size
            fi, fj = np.divmod(codes, n)
        sizes.append(count)
        reps.append((int(start // n), int(start % n)))

    orbit_id = flat.reshape(n, n)
    transpose_map = np.array([orbit_id[j, i] for i, j in reps], dtype=np.int64)
    M = len(sizes)
    if M >= n * n and n > 1:
        logger.info("group acts trivially on pairs: %d orbits on %d points", M, n)
    return PairOrbitStructure(
        n=n,
        M=M,
        orbit_sizes=np.array(sizes, dtype=np.int64),
        transpose_map=transpose_map,
        representatives=reps,
        orbit_id=orbit_id,
    )


@dataclass
class StructureConstants:
    """
    Multiplication parameters of the canonical basis.

    mult[r] is the left-multiplication matrix of C_r in the basis C:
    mult[r][t, s] = p^t_{rs}, i.e. C_r C_s = sum_t p^t_{rs} C_t.
    """
    M: int
    mult: List[sparse.csr_matrix]
    norms: np.ndarray
    orbit_sizes: np.ndarray
    transpose_map: np.ndarray

    def coefficient(self, r: int, s: int, t: int) -> int:
        return int(self.mult[r][t, s])

    def product_coordinates(self, r: int, s: int) -> np.ndarray:
        return np.asarray(self.mult[r][:, [s]].todense()).ravel()

    def restrict(self, keep: Sequence[int]) -> "StructureConstants":
        """
        Table of the subalgebra spanned by C_r, r in keep.

        keep must be closed under products and transposition, e.g. the corner
        P A P of a sum P of diagonal orbits.
        """
        keep = np.asarray(keep, dtype=np.int64)
        pos = np.full(self.M, -1, dtype=np.int64)
        pos[keep] = np.arange(keep.size)
        if np.any(pos[self.transpose_map[keep]] < 0):
            raise ValueError("index set is not closed under transposition")
        mult = [self.mult[r][keep][:, keep].tocsr() for r in keep]
        return StructureConstants(
            M=int(keep.size),
            mult=mult,
            norms=self.norms[keep],
            orbit_sizes=self.orbit_sizes[keep],
            transpose_map=pos[self.transpose_map[keep]],
        )


def _count_products(O: np.ndarray, i: int, j: int, M: int) -> Tuple[np.ndarray, np.ndarray]:
    keys = O[i, :] * M + O[:, j]
    return np.unique(keys, return_counts=True)


def structure_constants(
    orbits: PairOrbitStructure,
    action: Optional[GroupAction] = None,
    *,
    audit: bool = False,
) -> StructureConstants:
    """p^t_{rs} = |{k : (i,k) in R_r, (k,j) in R_s}| from the first representative (i,j) of R_t."""
    O = orbits.require_explicit()
    M = orbits.M
    rows: Dict[int, List[Tuple[int, int, int]]] = {r: [] for r in range(M)}
    for t, (i, j) in enumerate(orbits.representatives):
        keys, counts = _count_products(O, i, j, M)
        if audit and orbits.orbit_sizes[t] > 1:
            members = np.flatnonzero(O.ravel() == t)
            i2, j2 = divmod(int(members[1]), orbits.n)
            keys2, counts2 = _count_products(O, i2, j2, M)
            if not (np.array_equal(keys, keys2) and np.array_equal(counts, counts2)):
                raise RepresentativeMismatch(
                    f"orbit {t}: representatives {(i, j)} and {(i2, j2)} give different counts"
                )
        r_idx, s_idx = np.divmod(keys, M)
        for r, s, c in zip(r_idx.tolist(), s_idx.tolist(), counts.tolist()):
            rows[r].append((t, s, c))

    mult = []
    for r in range(M):
        if rows[r]:
            t_arr, s_arr, c_arr = (np.array(v) for v in zip(*rows[r]))
        else:
            t_arr = s_arr = c_arr = np.zeros(0, dtype=np.int64)
        mult.append(sparse.csr_matrix((c_arr.astype(np.int64), (t_arr, s_arr)), shape=(M, M)))
    return StructureConstants(
        M=M,
        mult=mult,
        norms=orbits.norms,
        orbit_sizes=orbits.orbit_sizes.copy(),
        transpose_map=orbits.transpose_map.copy(),
    )


def group_average(X: np.ndarray, orbits: PairOrbitStructure) -> np.ndarray:
    """Orthogonal projection onto span{C_r}: each entry replaced by its orbit mean."""
    return orbits.from_coordinates(orbits.coordinates(X))
