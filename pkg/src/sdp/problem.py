"""
SDP data containers.

SDPAProblem follows the SDPA convention:

    (P)  min  c^T x   s.t.  sum_i F_i x_i - F_0 >= 0
    (D)  max  <F_0, Y> s.t.  <F_i, Y> = c_i,  Y >= 0

Every reduced program is produced through LinearSDPBuilder, which takes a
program over named variables with equalities, inequalities and linear matrix
inequalities, eliminates the equalities and emits (P) over the remaining free
variables. The value of the original objective is objective_sign * c^T x +
offset and the original variables are recovered as v0 + N x.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from src.errors import Infeasible
from src.groups.orbits import PairOrbitStructure

logger = logging.getLogger(__name__)

Row = Union[Mapping[int, float], Sequence[float], np.ndarray]


@dataclass
class BlockData:
    """
    One block of an SDPA problem.

    coeffs has one row per matrix F_0..F_m. Dense blocks store the full
    symmetric matrix row-major (size*size columns); diagonal blocks store the
    diagonal (size columns).
    """
    size: int
    diagonal: bool
    coeffs: sparse.csr_matrix

    @property
    def signed_size(self) -> int:
        return -self.size if self.diagonal else self.size

    @property
    def width(self) -> int:
        return self.size if self.diagonal else self.size * self.size

    def matrix(self, i: int) -> np.ndarray:
        row = np.asarray(self.coeffs[i].todense()).ravel()
        if self.diagonal:
            return np.diag(row)
        return row.reshape(self.size, self.size)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """sum_i F_i x_i - F_0 for this block (a vector for diagonal blocks)."""
        w = np.concatenate([[-1.0], np.asarray(x, dtype=float)])
        flat = np.asarray(self.coeffs.T @ w).ravel()
        return flat if self.diagonal else flat.reshape(self.size, self.size)


@dataclass
class SDPAProblem:
    c: np.ndarray
    blocks: List[BlockData]
    objective_sign: float = 1.0
    offset: float = 0.0
    lift: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)
    labels: List[str] = field(default_factory=list)
    meta: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        for k, blk in enumerate(self.blocks):
            if blk.coeffs.shape != (self.m + 1, blk.width):
                raise ValueError(
                    f"block {k + 1}: coefficient array {blk.coeffs.shape}, expected {(self.m + 1, blk.width)}"
                )

    @property
    def m(self) -> int:
        return int(self.c.size)

    @property
    def block_struct(self) -> List[int]:
        return [blk.signed_size for blk in self.blocks]

    @classmethod
    def from_entries(
        cls,
        m: int,
        block_struct: Sequence[int],
        c: Sequence[float],
        entries: Sequence[Tuple[int, int, int, int, float]],
        **kwargs,
    ) -> "SDPAProblem":
        """Build from 1-indexed (matno, blockno, i, j, value) entries of the upper triangle."""
        per_block: List[Tuple[List[int], List[int], List[float]]] = [([], [], []) for _ in block_struct]
        for matno, blockno, i, j, value in entries:
            if not 0 <= matno <= m:
                raise ValueError(f"matrix number {matno} out of range 0..{m}")
            if not 1 <= blockno <= len(block_struct):
                raise ValueError(f"block number {blockno} out of range 1..{len(block_struct)}")
            size = abs(block_struct[blockno - 1])
            if not (1 <= i <= size and 1 <= j <= size):
                raise ValueError(f"entry ({i}, {j}) outside block {blockno} of size {size}")
            rows, cols, vals = per_block[blockno - 1]
            if block_struct[blockno - 1] < 0:
                if i != j:
                    raise ValueError(f"off-diagonal entry ({i}, {j}) in diagonal block {blockno}")
                rows.append(matno)
                cols.append(i - 1)
                vals.append(value)
                continue
            a, b = min(i, j) - 1, max(i, j) - 1
            rows.append(matno)
            cols.append(a * size + b)
            vals.append(value)
            if a != b:
                rows.append(matno)
                cols.append(b * size + a)
                vals.append(value)
        blocks = []
        for signed, (rows, cols, vals) in zip(block_struct, per_block):
            size = abs(signed)
            width = size if signed < 0 else size * size
            coeffs = sparse.csr_matrix((vals, (rows, cols)), shape=(m + 1, width))
            coeffs.sum_duplicates()
            blocks.append(BlockData(size=size, diagonal=signed < 0, coeffs=coeffs))
        return cls(c=np.asarray(c, dtype=float), blocks=blocks, **kwargs)

    def entries(self):
        """1-indexed (matno, blockno, i, j, value) over the upper triangles, nonzeros only."""
        for k, blk in enumerate(self.blocks, start=1):
            coo = blk.coeffs.tocoo()
            order = np.lexsort((coo.col, coo.row))
            for matno, col, value in zip(coo.row[order], coo.col[order], coo.data[order]):
                if value == 0:
                    continue
                if blk.diagonal:
                    yield int(matno), k, int(col) + 1, int(col) + 1, float(value)
                    continue
                i, j = divmod(int(col), blk.size)
                if i <= j:
                    yield int(matno), k, i + 1, j + 1, float(value)

    def slack(self, x: np.ndarray) -> List[np.ndarray]:
        return [blk.evaluate(x) for blk in self.blocks]

    def objective_value(self, x: np.ndarray) -> float:
        """Value of the objective of the program this problem was built from."""
        return float(self.objective_sign * (self.c @ np.asarray(x, dtype=float)) + self.offset)

    def lifted(self, x: np.ndarray) -> np.ndarray:
        if self.lift is None:
            return np.asarray(x, dtype=float)
        v0, N = self.lift
        return v0 + N @ np.asarray(x, dtype=float)

    def summary(self) -> Dict:
        return {
            "m": self.m,
            "block_struct": self.block_struct,
            "objective_sign": self.objective_sign,
            "offset": self.offset,
        }


def embed_hermitian(H: np.ndarray) -> np.ndarray:
    """Real symmetric [[Re, -Im], [Im, Re]]; psd exactly when H is."""
    re, im = H.real, H.imag
    return np.block([[re, -im], [im, re]])


def _as_row(row: Row, n: int) -> np.ndarray:
    if isinstance(row, Mapping):
        out = np.zeros(n)
        for i, v in row.items():
            out[int(i)] += float(v)
        return out
    out = np.asarray(row, dtype=float).ravel()
    if out.size != n:
        raise ValueError(f"row of length {out.size}, expected {n}")
    return out


class LinearSDPBuilder:
    """
    Accumulates a program over nvars real variables v:

        max/min  g . v
        s.t.     a . v  = b           (equalities)
                 r . v >= h           (inequalities, one diagonal block)
                 sum_i v_i G_i - G_0 >= 0   (matrix inequalities)

    and emits it as an SDPAProblem over the free variables left after
    eliminating the equalities.
    """

    def __init__(self, nvars: int, labels: Optional[Sequence[str]] = None, tol: float = 1e-10):
        self.nvars = int(nvars)
        self.labels = list(labels) if labels is not None else [f"v{i}" for i in range(self.nvars)]
        self.tol = tol
        self.objective = np.zeros(self.nvars)
        self.maximize = True
        self.eq_rows: List[np.ndarray] = []
        self.eq_rhs: List[float] = []
        self.ineq_rows: List[np.ndarray] = []
        self.ineq_rhs: List[float] = []
        self.lmis: List[Tuple[sparse.csr_matrix, np.ndarray, int, str]] = []

    def set_objective(self, g: Row, maximize: bool = True) -> None:
        self.objective = _as_row(g, self.nvars)
        self.maximize = maximize

    def add_equality(self, row: Row, rhs: float) -> None:
        self.eq_rows.append(_as_row(row, self.nvars))
        self.eq_rhs.append(float(rhs))

    def add_inequality(self, row: Row, rhs: float) -> None:
        self.ineq_rows.append(_as_row(row, self.nvars))
        self.ineq_rhs.append(float(rhs))

    def add_nonnegative(self, indices: Sequence[int]) -> None:
        for i in indices:
            self.add_inequality({int(i): 1.0}, 0.0)

    def add_lmi(
        self,
        terms: Mapping[int, np.ndarray],
        constant: Optional[np.ndarray] = None,
        label: str = "",
    ) -> None:
        """sum_i v_i terms[i] - constant >= 0; complex Hermitian data is embedded as a real block."""
        mats = {int(i): np.asarray(G.toarray() if sparse.issparse(G) else G) for i, G in terms.items()}
        if not mats and constant is None:
            return
        size = next(iter(mats.values())).shape[0] if mats else np.asarray(constant).shape[0]
        G0 = np.zeros((size, size)) if constant is None else np.asarray(constant)
        scale = max([1.0] + [float(np.abs(G).max()) for G in mats.values()] + [float(np.abs(G0).max())])
        is_complex = any(np.iscomplexobj(G) and np.abs(G.imag).max() > 1e-12 * scale for G in [*mats.values(), G0])
        if is_complex:
            prep = lambda G: embed_hermitian(0.5 * (G + G.conj().T))  # noqa: E731
            size *= 2
        else:
            prep = lambda G: 0.5 * (G.real + G.real.T)  # noqa: E731
        rows, cols, vals = [], [], []
        for i, G in mats.items():
            flat = prep(G).ravel()
            nz = np.flatnonzero(np.abs(flat) > 1e-15 * scale)
            rows.extend([i] * nz.size)
            cols.extend(nz.tolist())
            vals.extend(flat[nz].tolist())
        coeffs = sparse.csr_matrix((vals, (rows, cols)), shape=(self.nvars, size * size))
        coeffs.sum_duplicates()
        self.lmis.append((coeffs, prep(G0).ravel(), size, label))

    # -- elimination -------------------------------------------------------

    def _column_weights(self) -> np.ndarray:
        w = np.zeros(self.nvars)
        for coeffs, _, _, _ in self.lmis:
            w += np.diff(coeffs.indptr)
        for row in self.ineq_rows:
            w += row != 0
        return w

    def _eliminate(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Gauss-Jordan on the equalities; returns (v0, N, free) with v = v0 + N x."""
        nv = self.nvars
        if not self.eq_rows:
            return np.zeros(nv), np.eye(nv), np.arange(nv)
        E = np.array(self.eq_rows, dtype=float)
        e = np.array(self.eq_rhs, dtype=float)
        weights = self._column_weights()
        scale = max(1.0, float(np.abs(E).max()))
        pivots: List[Tuple[int, int]] = []
        used = np.zeros(nv, dtype=bool)
        for k in range(E.shape[0]):
            row = np.where(used, 0.0, np.abs(E[k]))
            top = row.max() if row.size else 0.0
            if top <= self.tol * scale:
                if abs(e[k]) > 1e-8 * (1.0 + np.abs(e).max()):
                    raise Infeasible(f"equality constraints are inconsistent (residual {e[k]:.3e})")
                E[k] = 0.0
                e[k] = 0.0
                continue
            candidates = np.flatnonzero(row >= 0.5 * top)
            j = int(candidates[np.argmin(weights[candidates])])
            e[k] /= E[k, j]
            E[k] /= E[k, j]
            others = np.flatnonzero(E[:, j])
            others = others[others != k]
            if others.size:
                factors = E[others, j].copy()
                E[others] -= np.outer(factors, E[k])
                e[others] -= factors * e[k]
                E[others, j] = 0.0
            E[np.abs(E) < 1e-14 * scale] = 0.0
            used[j] = True
            pivots.append((k, j))

        free = np.flatnonzero(~used)
        v0 = np.zeros(nv)
        N = np.zeros((nv, free.size))
        N[free, np.arange(free.size)] = 1.0
        for k, j in pivots:
            v0[j] = e[k]
            N[j] = -E[k, free]
        logger.debug("eliminated %d equalities, %d free variables remain", len(pivots), free.size)
        return v0, N, free

    def build(self) -> SDPAProblem:
        v0, N, free = self._eliminate()
        nx = N.shape[1]
        identity = nx == self.nvars and not self.eq_rows
        Ns = sparse.csr_matrix(N)

        blocks: List[BlockData] = []
        for coeffs, G0, size, _ in self.lmis:
            const = G0 - np.asarray(coeffs.T @ v0).ravel()
            body = coeffs if identity else sparse.csr_matrix(Ns.T @ coeffs)
            body.eliminate_zeros()
            stacked = sparse.vstack([sparse.csr_matrix(const[None, :]), body], format="csr")
            blocks.append(BlockData(size=size, diagonal=False, coeffs=stacked))

        if self.ineq_rows:
            R = np.array(self.ineq_rows)
            h = np.array(self.ineq_rhs) - R @ v0
            Rx = R if identity else R @ N
            rscale = np.abs(Rx).max(axis=1) if nx else np.zeros(len(h))
            constant = rscale <= self.tol * np.maximum(1.0, np.abs(R).max(axis=1))
            if np.any(h[constant] > 1e-8 * (1.0 + np.abs(h).max())):
                bad = int(np.flatnonzero(constant & (h > 0))[0])
                raise Infeasible(f"inequality {bad} cannot be satisfied: 0 >= {h[bad]:.3e}")
            keep = ~constant
            if keep.any():
                body = Rx[keep].T
                data = np.vstack([h[keep][None, :], body])
                blocks.append(BlockData(size=int(keep.sum()), diagonal=True, coeffs=sparse.csr_matrix(data)))

        g = self.objective @ N
        offset = float(self.objective @ v0)
        sign = -1.0 if self.maximize else 1.0
        return SDPAProblem(
            c=sign * g,
            blocks=blocks,
            objective_sign=sign,
            offset=offset,
            lift=(v0, N),
            labels=[self.labels[j] for j in free],
        )


@dataclass
class InvariantSDP:
    """
    A G-invariant SDP in orbit coordinates.

    The matrix variable is X = sum_r x_r C_r. The objective is <C, X> and the
    constraints are <A_i, X> = b_i, stored as orbit sums c_r = <C_r, C> and
    a_ir = <C_r, A_i>. nonnegative[r] asks for x_r >= 0.
    """
    orbits: PairOrbitStructure
    c: np.ndarray
    constraints: List[Tuple[np.ndarray, float]]
    nonnegative: np.ndarray
    maximize: bool = True
    label: str = ""

    def __post_init__(self):
        M = self.orbits.M
        self.c = np.asarray(self.c)
        self.nonnegative = np.broadcast_to(np.asarray(self.nonnegative, dtype=bool), (M,)).copy()
        if self.c.shape != (M,):
            raise ValueError(f"objective has shape {self.c.shape}, expected ({M},)")
        for k, (a, _) in enumerate(self.constraints):
            if np.shape(a) != (M,):
                raise ValueError(f"constraint {k} has shape {np.shape(a)}, expected ({M},)")

    @property
    def M(self) -> int:
        return self.orbits.M

    @property
    def is_real(self) -> bool:
        data = [self.c] + [a for a, _ in self.constraints]
        return all(not np.iscomplexobj(v) or not np.any(np.asarray(v).imag) for v in data)

    def variables(self) -> Tuple[List[str], np.ndarray]:
        """
        Real variables of the Hermitian pipeline and their orbit coordinates.

        Row v of the returned (nvars, M) array gives x_r in terms of variable v.
        Each orbit paired with its transpose contributes Re and, for complex
        data without a sign constraint, Im.
        """
        M = self.M
        rows, labels = [], []
        for members in self.orbits.symmetric_classes():
            r = members[0]
            vec = np.zeros(M, dtype=complex)
            vec[list(members)] = 1.0
            rows.append(vec)
            labels.append(f"x{r}")
            if len(members) == 2 and not self.is_real and not self.nonnegative[r]:
                im = np.zeros(M, dtype=complex)
                im[members[0]], im[members[1]] = 1j, -1j
                rows.append(im)
                labels.append(f"x{r}_im")
        return labels, np.array(rows)

    def functional(self, w: np.ndarray, T: np.ndarray) -> np.ndarray:
        """Coefficients over the variables of Re sum_r conj(w_r) x_r."""
        return np.real(T @ np.conj(np.asarray(w, dtype=complex)))

    def builder(self, T: np.ndarray, labels: Optional[Sequence[str]] = None) -> LinearSDPBuilder:
        """
        Builder with the objective, constraints and sign constraints for
        variables whose orbit coordinates are x = T^T v. T is (nvars, M).
        """
        b = LinearSDPBuilder(T.shape[0], labels)
        b.set_objective(self.functional(self.c, T), maximize=self.maximize)
        for a, rhs in self.constraints:
            b.add_equality(self.functional(a, T), rhs)
        for members in self.orbits.symmetric_classes():
            r = members[0]
            if not self.nonnegative[r]:
                continue
            row = np.real(T[:, r])
            if np.any(row):
                b.add_inequality(row, 0.0)
        return b
