"""
alpha_m = min <X, C>  s.t.  X >= 0 entrywise, X psd, <X, J> = 1, over Z_m x Z_m,
and the resulting lower bound on cr(K_{m,n}).

G = S_m x {+1, -1} acts on Z_m by sigma -> pi sigma^i pi^{-1}. G is transitive on
Z_m and the stabilizer of sigma_0 = (1, .., m) is the dihedral group of order
2m, so the orbits of G on pairs are the orbits of that dihedral group on the
second coordinate, with representatives (sigma_0, tau).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from tqdm import tqdm

from src.config import AppConfig
from src.crossing.cyclic import CyclicSpace, conjugate, diagonal_crossings, invert, swap_distances
from src.errors import TooLarge
from src.groups.orbits import PairOrbitStructure, StructureConstants
from src.sdp.problem import InvariantSDP
from src.sdp.reduction import dense_sdp, reduce_regular
from src.solver.result import SolveResult
from src.solver.sdp import solve_sdp
from src.utils.tracker import RunTracker

logger = logging.getLogger(__name__)

MAX_EXPLICIT = 720
DESK_M = 7


def _stabilizer_images(space: CyclicSpace) -> List[np.ndarray]:
    """Index maps of the two generators of the stabilizer of sigma_0 (rotation, reflection with inversion)."""
    m = space.m
    shift = (np.arange(m) + 1) % m
    neg = (-np.arange(m)) % m
    rot = space.index(conjugate(shift, space.succ))
    ref = space.index(conjugate(neg, invert(space.succ)))
    return [rot, ref]


def _second_coordinate_orbits(space: CyclicSpace) -> np.ndarray:
    """Orbit label of (sigma_0, tau) for every tau; labels ordered by smallest member."""
    N = space.size
    rows = np.concatenate([np.arange(N)] * 2)
    cols = np.concatenate(_stabilizer_images(space))
    graph = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(N, N))
    _, labels = connected_components(graph, directed=True, connection="weak")
    first = np.full(labels.max() + 1, N, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(N))
    rank = np.empty_like(first)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[labels]


@dataclass
class CrossingOrbits:
    """Pair orbits of Z_m together with the per-orbit crossing values C_r."""
    m: int
    space: CyclicSpace
    orbits: PairOrbitStructure
    tau_orbit: np.ndarray
    crossing: np.ndarray

    def pair_orbit(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """Orbit ids of the pairs (sigma_i, sigma_j)."""
        pi = self.space.relabelings[np.asarray(i)]
        moved = conjugate(pi, self.space.succ[np.asarray(j)])
        return self.tau_orbit[self.space.index(moved)]

    def dense_crossing(self) -> np.ndarray:
        return self.crossing[self.orbits.require_explicit()]


def orbit_structure(m: int, explicit: Optional[bool] = None) -> CrossingOrbits:
    """
    Orbits of Z_m x Z_m under G. The n x n orbit_id is built only when
    explicit (default: when (m-1)! <= 720).
    """
    space = CyclicSpace(m)
    N = space.size
    tau_orbit = _second_coordinate_orbits(space)
    M = int(tau_orbit.max()) + 1
    reps = np.array([int(np.flatnonzero(tau_orbit == r)[0]) for r in range(M)])
    stab_sizes = np.bincount(tau_orbit, minlength=M)

    # (sigma_0, tau) transposed is (tau, sigma_0) ~ (sigma_0, pi_tau sigma_0 pi_tau^{-1})
    back = conjugate(space.relabelings[reps], space.succ[0])
    transpose_map = tau_orbit[space.index(back)]

    dist = swap_distances(m)
    crossing = dist[space.inverse_index[reps]].astype(float)

    explicit = N <= MAX_EXPLICIT if explicit is None else explicit
    orbit_id = None
    if explicit:
        if N > MAX_EXPLICIT:
            raise TooLarge(f"explicit orbit table of {N}^2 pairs exceeds the cap of {MAX_EXPLICIT}^2")
        orbit_id = np.empty((N, N), dtype=np.int64)
        cols = np.arange(N)
        for i in range(N):
            orbit_id[i] = tau_orbit[space.index(conjugate(space.relabelings[i], space.succ[cols]))]

    orbits = PairOrbitStructure(
        n=N,
        M=M,
        orbit_sizes=(N * stab_sizes).astype(np.int64),
        transpose_map=transpose_map.astype(np.int64),
        representatives=[(0, int(t)) for t in reps],
        orbit_id=orbit_id,
        labels=[space.cycle_string(int(t)) for t in reps],
    )
    logger.info("Z_%d: %d cyclic permutations, %d pair orbits", m, N, M)
    return CrossingOrbits(m=m, space=space, orbits=orbits, tau_orbit=tau_orbit, crossing=crossing)


def crossing_structure_constants(co: CrossingOrbits, progress: bool = False) -> StructureConstants:
    """p^t_{rs} = #{rho : (sigma_0, rho) in R_r, (rho, tau_t) in R_s} from the representatives."""
    space, M = co.space, co.orbits.M
    N = space.size
    r_of_rho = co.tau_orbit
    pi = space.relabelings
    rows, cols, vals = [], [], []
    for t, (_, tau) in enumerate(tqdm(co.orbits.representatives, desc=f"p^t_rs (m={co.m})", disable=not progress)):
        s_of_rho = co.tau_orbit[space.index(conjugate(pi, space.succ[tau]))]
        keys, counts = np.unique(r_of_rho * M + s_of_rho, return_counts=True)
        r, s = np.divmod(keys, M)
        rows.append(r * M + t)
        cols.append(s)
        vals.append(counts)
    big = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(M * M, M), dtype=np.int64
    )
    mult = [big[r * M:(r + 1) * M].tocsr() for r in range(M)]
    logger.debug("structure constants of Z_%d: %d nonzeros over %d points", co.m, big.nnz, N)
    return StructureConstants(
        M=M,
        mult=mult,
        norms=co.orbits.norms,
        orbit_sizes=co.orbits.orbit_sizes.copy(),
        transpose_map=co.orbits.transpose_map.copy(),
    )


def alpha_program(co: CrossingOrbits) -> InvariantSDP:
    sizes = co.orbits.orbit_sizes.astype(float)
    return InvariantSDP(
        orbits=co.orbits,
        c=sizes * co.crossing,
        constraints=[(sizes.copy(), 1.0)],
        nonnegative=np.ones(co.orbits.M, dtype=bool),
        maximize=False,
        label=f"alpha_{co.m}",
    )


@dataclass
class AlphaResult:
    m: int
    alpha: float
    backend: str
    status: str
    orbits: int
    block_size: int
    timings: dict = field(default_factory=dict)
    result: Optional[SolveResult] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "alpha": float(self.alpha),
            "backend": self.backend,
            "status": self.status,
            "orbits": self.orbits,
            "block_size": self.block_size,
        }


def alpha_m(m: int, backend: str = "regular", long: bool = False, config: Optional[AppConfig] = None) -> AlphaResult:
    """
    alpha_m through the regular *-representation (one block of size M) or,
    for small m, the unreduced program over all of Z_m x Z_m (backend="dense").
    m = 8, 9 run only with long=True.
    """
    cfg = config or AppConfig()
    if m > DESK_M and not long:
        raise TooLarge(f"alpha_{m} is a long-running computation; pass long=True (--long)")
    tracker = RunTracker()
    with tracker.stage("orbits"):
        co = orbit_structure(m, explicit=backend == "dense")
    if backend == "dense":
        C = co.dense_crossing()
        N = C.shape[0]
        with tracker.stage("build"):
            problem = dense_sdp(C, [(np.ones((N, N)), 1.0)], nonnegative=True, maximize=False)
        size = N
    elif backend == "regular":
        with tracker.stage("structure_constants"):
            sc = crossing_structure_constants(co, progress=m > DESK_M)
        with tracker.stage("build"):
            problem = reduce_regular(alpha_program(co), sc)
        size = co.orbits.M
    else:
        raise ValueError(f"unknown backend {backend!r}")
    with tracker.stage("solve"):
        result = solve_sdp(problem, config=cfg.solver)
    logger.info("alpha_%d = %.10f (%s, block %d, status %s)", m, result.objective, backend, size, result.status)
    return AlphaResult(
        m=m,
        alpha=float(result.objective),
        backend=backend,
        status=result.status,
        orbits=co.orbits.M,
        block_size=size,
        timings=tracker.get_stats()["by_stage"],
        result=result,
    )


def crossing_bound(m: int, n: int, alpha: float) -> float:
    """cr(K_{m,n}) >= n^2 alpha_m / 2 - n floor((m-1)^2/4) / 2."""
    if n < 1:
        raise ValueError(f"n={n} must be positive")
    return 0.5 * n * n * alpha - 0.5 * n * diagonal_crossings(m)


def zarankiewicz(m: int, n: int) -> int:
    """Z(m, n) = floor(m/2) floor((m-1)/2) floor(n/2) floor((n-1)/2)."""
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got m={m}, n={n}")
    return (m // 2) * ((m - 1) // 2) * (n // 2) * ((n - 1) // 2)
