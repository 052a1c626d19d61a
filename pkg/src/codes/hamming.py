"""
The Hamming space q^n: distance algebra, automorphism action, Delsarte LP.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.algebra.basis import AlgebraBasis
from src.codes.krawtchouk import KrawtchoukTable
from src.config import SolverConfig
from src.errors import TooLarge
from src.groups.permutation import GroupAction, Permutation
from src.solver.lp import LPProblem, solve_lp
from src.solver.result import SolveResult

logger = logging.getLogger(__name__)

MAX_WORDS = 1 << 12


@dataclass(frozen=True)
class HammingSpace:
    q: int
    n: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet size q={self.q} must be at least 2")
        if self.n < 1:
            raise ValueError(f"word length n={self.n} must be at least 1")

    @property
    def size(self) -> int:
        return self.q ** self.n

    def words(self) -> np.ndarray:
        """(q^n, n) array of all words in lexicographic order; row index = word index."""
        return np.array(np.unravel_index(np.arange(self.size), (self.q,) * self.n), dtype=np.int64).T

    def index(self, words: np.ndarray) -> np.ndarray:
        powers = self.q ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
        return np.asarray(words, dtype=np.int64) @ powers

    def distance_matrix(self, max_words: int = MAX_WORDS) -> np.ndarray:
        if self.size > max_words:
            raise TooLarge(f"{self.size} words exceed the cap of {max_words}")
        W = self.words()
        D = np.zeros((self.size, self.size), dtype=np.int16)
        for k in range(self.n):
            col = W[:, k]
            D += col[:, None] != col[None, :]
        return D

    def graph_edges(self, d: int, max_words: int = MAX_WORDS) -> List[Tuple[int, int]]:
        """Edges of the graph joining words at distance 1..d-1 (codes are its independent sets)."""
        D = self.distance_matrix(max_words)
        rows, cols = np.nonzero((D > 0) & (D < d))
        return [(int(u), int(v)) for u, v in zip(rows, cols) if u < v]


def distance_basis(space: HammingSpace, max_n: int = 12, max_words: int = MAX_WORDS) -> AlgebraBasis:
    """The 0/1 matrices A_0..A_n of the distance relations (Bose-Mesner basis)."""
    if space.n > max_n or space.size > max_words:
        raise TooLarge(f"Hamming space {space.q}^{space.n} is beyond the explicit limit (n <= {max_n}, {max_words} words)")
    D = space.distance_matrix(max_words)
    mats = []
    for i in range(space.n + 1):
        rows, cols = np.nonzero(D == i)
        mats.append(sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(space.size, space.size)))
    return AlgebraBasis(n=space.size, elements=mats, labels=[f"A{i}" for i in range(space.n + 1)])


def hamming_action(space: HammingSpace) -> GroupAction:
    """Generators of S_q wr S_n acting on the q^n words."""
    W = space.words()
    q, n = space.q, space.n
    gens: List[Permutation] = []

    def perm_of(moved: np.ndarray) -> Permutation:
        return Permutation(tuple(space.index(moved).tolist()))

    if n >= 2:
        gens.append(perm_of(W[:, [1, 0] + list(range(2, n))]))
    if n >= 3:
        gens.append(perm_of(W[:, list(range(1, n)) + [0]]))
    swap = W.copy()
    swap[:, 0] = np.where(W[:, 0] == 0, 1, np.where(W[:, 0] == 1, 0, W[:, 0]))
    gens.append(perm_of(swap))
    if q >= 3:
        cyc = W.copy()
        cyc[:, 0] = (W[:, 0] + 1) % q
        gens.append(perm_of(cyc))
    return GroupAction(space.size, tuple(gens))


def min_distance(words: Sequence[Sequence[int]]) -> int:
    """Minimum distance of an explicit code (n + 1 for a single word)."""
    W = np.asarray(words, dtype=np.int64)
    if W.ndim != 2 or W.shape[0] == 0:
        raise ValueError("code must be a non-empty list of words")
    if W.shape[0] == 1:
        return W.shape[1] + 1
    D = (W[:, None, :] != W[None, :, :]).sum(axis=2)
    np.fill_diagonal(D, W.shape[1] + 1)
    return int(D.min())


def repetition_code(n: int, q: int = 2) -> np.ndarray:
    return np.repeat(np.arange(q)[:, None], n, axis=1)


def even_weight_code(n: int) -> np.ndarray:
    W = HammingSpace(2, n).words()
    return W[W.sum(axis=1) % 2 == 0]


@dataclass
class DelsarteBound:
    n: int
    d: int
    q: int
    mode: str
    status: str
    bound: object
    distribution: List[object] = field(default_factory=list)
    result: Optional[SolveResult] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        def num(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {
            "n": self.n,
            "d": self.d,
            "q": self.q,
            "mode": self.mode,
            "status": self.status,
            "bound": num(self.bound),
            "bound_float": float(self.bound),
            "distribution": [num(v) for v in self.distribution],
        }


def delsarte_lp(n: int, d: int, q: int = 2, mode: str = "rational", config: Optional[SolverConfig] = None) -> DelsarteBound:
    """
    max sum_i binom(n,i)(q-1)^i x_i  s.t.  x_0 = 1, x_1..x_{d-1} = 0, x_i >= 0,
    sum_i x_i P_i(j) >= 0 for j = 0..n.

    The optimal x is the normalized distance distribution of the bound.
    """
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    table = KrawtchoukTable(n, q)
    c = [comb(n, i) * (q - 1) ** i for i in range(n + 1)]
    A_ub = [[-table(i, j) for i in range(n + 1)] for j in range(n + 1)]
    b_ub = [0] * (n + 1)
    bounds = [(1, 1)] + [(0, 0) if i < d else (0, None) for i in range(1, n + 1)]
    lp = LPProblem(c=c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, maximize=True, labels=[f"x{i}" for i in range(n + 1)])
    result = solve_lp(lp, mode=mode, config=config)
    if not result.ok:
        logger.warning("Delsarte LP (n=%d, d=%d, q=%d) ended with status %s", n, d, q, result.status)
        return DelsarteBound(n, d, q, mode, result.status, float("nan"), [], result)
    logger.info("Delsarte bound A_%d(%d,%d) <= %s", q, n, d, result.objective)
    return DelsarteBound(n, d, q, mode, result.status, result.objective, list(result.x), result)
