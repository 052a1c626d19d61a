"""
Terwilliger algebra of the binary Hamming scheme and the triple-distance bound.

The stabilizer of the zero word (coordinate permutations) has one orbit on
pairs of words (v, w) for every (i, j, t) = (|v|, |w|, |v & w|). Orbits of
word triples (u, v, w) are the same objects after translating u to zero; the
three pairwise distances of such a triple are i, j and i + j - 2t.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse

from src.algebra.basis import AlgebraBasis
from src.algebra.blockdiag import block_diagonalize
from src.algebra.regular import RegularRep
from src.config import AppConfig
from src.errors import TooLarge, UnverifiedIsomorphism
from src.groups.orbits import PairOrbitStructure, StructureConstants
from src.sdp.problem import LinearSDPBuilder, SDPAProblem
from src.solver.result import SolveResult
from src.solver.sdp import solve_sdp

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]

MAX_N = 14
MAX_EXPLICIT_N = 10


@dataclass
class TripleOrbitIndex:
    """Orbits (i, j, t), 0 <= t <= i, j and i + j - t <= n, ordered lexicographically."""
    n: int
    triples: List[Triple]
    lookup: Dict[Triple, int]
    table: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return len(self.triples)

    def __getitem__(self, key: Triple) -> int:
        return self.lookup[key]

    @staticmethod
    def distances(triple: Triple) -> Triple:
        i, j, t = triple
        return i, j, i + j - 2 * t

    def symmetry_class(self, r: int) -> Triple:
        """Sorted pairwise distances; orbits of reordered triples share it."""
        return tuple(sorted(self.distances(self.triples[r])))

    def classes(self) -> Dict[Triple, List[int]]:
        out: Dict[Triple, List[int]] = {}
        for r in range(self.M):
            out.setdefault(self.symmetry_class(r), []).append(r)
        return dict(sorted(out.items()))

    def orbit_size(self, r: int) -> int:
        """Number of word pairs (v, w) in the orbit."""
        i, j, t = self.triples[r]
        return comb(self.n, i) * comb(i, t) * comb(self.n - i, j - t)

    def representative(self, r: int) -> Tuple[int, int]:
        """v on bits 0..i-1, w on bits 0..t-1 and i..i+j-t-1."""
        i, j, t = self.triples[r]
        v = (1 << i) - 1
        w = ((1 << t) - 1) | (((1 << (j - t)) - 1) << i)
        return v, w

    def transpose(self, r: int) -> int:
        i, j, t = self.triples[r]
        return self.lookup[(j, i, t)]

    def weight_corner(self, weights) -> List[int]:
        """Orbits (i, j, t) with both i and j in weights."""
        allowed = set(weights)
        return [r for r, (i, j, _) in enumerate(self.triples) if i in allowed and j in allowed]


def triple_orbit_index(n: int) -> TripleOrbitIndex:
    if n < 1:
        raise ValueError(f"word length n={n} must be at least 1")
    triples = [
        (i, j, t)
        for i in range(n + 1)
        for j in range(n + 1)
        for t in range(min(i, j) + 1)
        if i + j - t <= n
    ]
    lookup = {tr: r for r, tr in enumerate(triples)}
    table = np.full((n + 1,) * 3, -1, dtype=np.int64)
    for r, (i, j, t) in enumerate(triples):
        table[i, j, t] = r
    return TripleOrbitIndex(n=n, triples=triples, lookup=lookup, table=table)


def _popcount(words: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(words.shape, dtype=np.int64)
    for b in range(n):
        out += (words >> b) & 1
    return out


def terwilliger_orbits(n: int, explicit: bool = False) -> PairOrbitStructure:
    """
    Pair orbits of the zero-word stabilizer on {0,1}^n, points indexed by the
    integer value of the word. orbit_id is only materialized when explicit.
    """
    index = triple_orbit_index(n)
    orbit_id = None
    if explicit:
        if n > MAX_EXPLICIT_N:
            raise TooLarge(f"explicit 2^{n} x 2^{n} orbit labels requested, limit n <= {MAX_EXPLICIT_N}")
        words = np.arange(1 << n, dtype=np.int64)
        pc = _popcount(words, n)
        meet = _popcount(words[:, None] & words[None, :], n)
        orbit_id = index.table[pc[:, None], pc[None, :], meet]
    return PairOrbitStructure(
        n=1 << n,
        M=index.M,
        orbit_sizes=np.array([index.orbit_size(r) for r in range(index.M)], dtype=np.int64),
        transpose_map=np.array([index.transpose(r) for r in range(index.M)], dtype=np.int64),
        representatives=[index.representative(r) for r in range(index.M)],
        orbit_id=orbit_id,
        labels=[f"A{i},{j}^{t}" for i, j, t in index.triples],
    )


def terwilliger_structure_constants(n: int, max_n: int = MAX_N) -> StructureConstants:
    """
    p^t_{rs} by counting words z against the representative (v, w) of each
    orbit t: z contributes to (r, s) = ((|v|, |z|, |v & z|), (|z|, |w|, |z & w|)).
    """
    if n > max_n:
        raise TooLarge(f"triple-orbit enumeration over 2^{n} words, limit n <= {max_n}")
    index = triple_orbit_index(n)
    M = index.M
    z = np.arange(1 << n, dtype=np.int64)
    wz = _popcount(z, n)
    rows: Dict[int, List[Tuple[int, int, int]]] = {r: [] for r in range(M)}
    for t in range(M):
        v, w = index.representative(t)
        i, j, _ = index.triples[t]
        r = index.table[i, wz, _popcount(z & v, n)]
        s = index.table[wz, j, _popcount(z & w, n)]
        keys, counts = np.unique(r * M + s, return_counts=True)
        for key, c in zip(keys.tolist(), counts.tolist()):
            rr, ss = divmod(key, M)
            rows[rr].append((t, ss, c))
    mult = []
    for r in range(M):
        if rows[r]:
            t_arr, s_arr, c_arr = (np.array(col, dtype=np.int64) for col in zip(*rows[r]))
        else:
            t_arr = s_arr = c_arr = np.zeros(0, dtype=np.int64)
        mult.append(sparse.csr_matrix((c_arr, (t_arr, s_arr)), shape=(M, M)))
    sizes = np.array([index.orbit_size(r) for r in range(M)], dtype=np.int64)
    logger.debug("Terwilliger algebra n=%d: %d basis elements", n, M)
    return StructureConstants(
        M=M,
        mult=mult,
        norms=np.sqrt(sizes.astype(float)),
        orbit_sizes=sizes,
        transpose_map=np.array([index.transpose(r) for r in range(M)], dtype=np.int64),
    )


def terwilliger_block_sizes(n: int) -> List[int]:
    return [n + 1 - 2 * k for k in range(n // 2 + 1)]


@dataclass
class TripleBound:
    n: int
    d: int
    backend: str
    bound: float
    status: str
    variables: int
    block_struct: List[int]
    problem: Optional[SDPAProblem] = field(default=None, repr=False)
    result: Optional[SolveResult] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "backend": self.backend,
            "bound": float(self.bound),
            "status": self.status,
            "variables": self.variables,
            "blocks": " ".join(str(b) for b in self.block_struct),
        }


def _corner_images(sc: StructureConstants, corner: List[int], backend: str, cfg: AppConfig) -> List[List[np.ndarray]]:
    """images[r][k] for the corner orbits, through L or through a numerical block diagonalization of L."""
    sub = sc.restrict(corner)
    rep = RegularRep(sub)
    if backend == "regular":
        return [[rep.matrix(r)] for r in range(sub.M)]
    bd = block_diagonalize(AlgebraBasis.from_dense(rep.L), seed=cfg.seed, config=cfg.algebra)
    if not bd.residual <= 1e3 * cfg.algebra.verify_tol:
        raise UnverifiedIsomorphism(f"corner block diagonalization residual {bd.residual:.2e}")
    logger.info("corner of %d orbits splits into blocks %s", sub.M, bd.block_sizes)
    return bd.images


def schrijver_triple_sdp(
    n: int,
    d: int,
    backend: str = "regular",
    config: Optional[AppConfig] = None,
) -> TripleBound:
    """
    Upper bound on A(n, d) from the distribution of word triples.

    Variables x_{i,j}^t, one per class of reordered triples, with
      x_{0,0}^0 = 1, x = 0 when a pairwise distance lies in 1..d-1,
      0 <= x_{i,j}^t <= x_{i,0}^0,  x_{i,0}^0 + x_{j,0}^0 <= 1 + x_{i,j}^t,
      sum x_{i,j}^t A_{i,j}^t >= 0,  sum (x_{i+j-2t,0}^0 - x_{i,j}^t) A_{i,j}^t >= 0,
    maximizing sum_i binom(n, i) x_{i,0}^0. Each psd constraint is posed on the
    corner of word weights where its diagonal is not forced to zero.
    """
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    if backend not in ("regular", "blockdiag"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "blockdiag" and n > MAX_EXPLICIT_N:
        raise TooLarge(f"blockdiag backend is limited to n <= {MAX_EXPLICIT_N}")
    cfg = config or AppConfig()
    index = triple_orbit_index(n)
    sc = terwilliger_structure_constants(n)
    forbidden = set(range(1, d))

    keys = [key for key in index.classes() if not forbidden.intersection(key)]
    var_of = {key: v for v, key in enumerate(keys)}
    labels = ["x" + "_".join(map(str, key)) for key in keys]

    def var(r: int) -> Optional[int]:
        return var_of.get(index.symmetry_class(r))

    def pair_var(i: int) -> Optional[int]:
        return var_of.get((0, i, i))

    builder = LinearSDPBuilder(len(keys), labels)
    builder.set_objective({pair_var(i): comb(n, i) for i in range(n + 1) if pair_var(i) is not None}, maximize=True)
    builder.add_equality({var_of[(0, 0, 0)]: 1.0}, 1.0)
    builder.add_nonnegative(range(len(keys)))

    seen = set()

    def inequality(row: Dict[int, float], rhs: float) -> None:
        row = {k: v for k, v in row.items() if v != 0}
        if not row:
            return
        key = (tuple(sorted(row.items())), rhs)
        if key not in seen:
            seen.add(key)
            builder.add_inequality(row, rhs)

    for r, (i, j, t) in enumerate(index.triples):
        a = var(r)
        if a is None:
            continue
        bi, bj = pair_var(i), pair_var(j)
        if bi is not None and bi != a:
            inequality({bi: 1.0, a: -1.0}, 0.0)
        row: Dict[int, float] = {a: 1.0}
        for b in (bi, bj):
            if b is not None:
                row[b] = row.get(b, 0.0) - 1.0
        inequality(row, -1.0)

    # psd constraints, coefficient of each variable in every orbit
    first = np.zeros((len(keys), index.M))
    second = np.zeros((len(keys), index.M))
    for r, (i, j, t) in enumerate(index.triples):
        a = var(r)
        if a is not None:
            first[a, r] = 1.0
            second[a, r] -= 1.0
        b = pair_var(i + j - 2 * t)
        if b is not None:
            second[b, r] += 1.0

    corners = (
        ("M1", index.weight_corner([0] + list(range(d, n + 1))), first),
        ("M2", index.weight_corner(range(1, n + 1)), second),
    )
    for name, corner, coeffs in corners:
        images = _corner_images(sc, corner, backend, cfg)
        nblocks = len(images[0])
        for k in range(nblocks):
            terms = {}
            for v in range(len(keys)):
                row = coeffs[v, corner]
                if not np.any(row):
                    continue
                terms[v] = sum(c * images[p][k] for p, c in enumerate(row) if c != 0)
            builder.add_lmi(terms, label=f"{name}.{k}")

    problem = builder.build()
    problem.meta.update({"n": n, "d": d, "backend": backend, "classes": keys})
    result = solve_sdp(problem, config=cfg.solver)
    logger.info("triple bound A(%d,%d) <= %.6f (%s, status %s)", n, d, result.objective, backend, result.status)
    return TripleBound(
        n=n,
        d=d,
        backend=backend,
        bound=float(result.objective),
        status=result.status,
        variables=len(keys),
        block_struct=problem.block_struct,
        problem=problem,
        result=result,
    )
