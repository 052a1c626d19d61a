from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from src.algebra.basis import AlgebraBasis
from src.algebra.blockdiag import block_diagonalize
from src.config import AppConfig
from src.errors import ActionNotAutomorphism
from src.groups.orbits import pair_orbits, structure_constants
from src.groups.permutation import GroupAction
from src.sdp.problem import InvariantSDP
from src.sdp.reduction import dense_sdp, reduce_block, reduce_regular, to_sdpa
from src.solver.result import SolveResult
from src.solver.sdp import solve_sdp

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


def _edge_set(edges: Iterable[Edge], n: int) -> set:
    out = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"loop at vertex {u}: graph must be simple")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
        out.add((min(u, v), max(u, v)))
    return out


def check_automorphisms(edges: Iterable[Edge], action: GroupAction) -> None:
    E = _edge_set(edges, action.n)
    for k, g in enumerate(action.generators):
        moved = {(min(g(u), g(v)), max(g(u), g(v))) for u, v in E}
        if moved != E:
            raise ActionNotAutomorphism(f"generator {k} does not map edges to edges")


def build_theta_prime(
    edges: Sequence[Edge],
    n: int,
    action: Optional[GroupAction] = None,
    *,
    nonnegative: bool = True,
) -> InvariantSDP:
    """
    max <J, X>  s.t.  tr X = 1,  X_uv = 0 on edges,  X psd  (and X >= 0).

    Without nonnegativity this is the Lovasz theta number of the graph.
    """
    E = _edge_set(edges, n)
    action = action or GroupAction.trivial(n)
    if action.n != n:
        raise ValueError(f"action on {action.n} points for a graph on {n} vertices")
    check_automorphisms(E, action)
    orbits = pair_orbits(action)
    O = orbits.orbit_id
    M = orbits.M
    sizes = orbits.orbit_sizes.astype(float)

    trace = np.zeros(M)
    trace[orbits.diagonal_orbits()] = sizes[orbits.diagonal_orbits()]
    constraints = [(trace, 1.0)]
    edge_orbits = sorted({int(O[u, v]) for u, v in E})
    for r in edge_orbits:
        if r <= int(orbits.transpose_map[r]):
            e = np.zeros(M)
            e[r] = 1.0
            constraints.append((e, 0.0))
    return InvariantSDP(
        orbits=orbits,
        c=sizes.copy(),
        constraints=constraints,
        nonnegative=np.full(M, nonnegative),
        maximize=True,
        label="theta_prime" if nonnegative else "theta",
    )


def solve_theta(
    edges: Sequence[Edge],
    n: int,
    action: Optional[GroupAction] = None,
    *,
    nonnegative: bool = True,
    backend: str = "regular",
    config: Optional[AppConfig] = None,
) -> SolveResult:
    """theta' (or theta) through one of the backends dense | orbit | regular | block."""
    cfg = config or AppConfig()
    if backend == "dense":
        _edge_set(edges, n)
        J = np.ones((n, n))
        cons = [(np.eye(n), 1.0)]
        for u, v in _edge_set(edges, n):
            A = np.zeros((n, n))
            A[u, v] = A[v, u] = 0.5
            cons.append((A, 0.0))
        problem = dense_sdp(J, cons, nonnegative=nonnegative, maximize=True)
    else:
        sdp = build_theta_prime(edges, n, action, nonnegative=nonnegative)
        if backend == "orbit":
            problem = to_sdpa(sdp)
        elif backend == "regular":
            problem = reduce_regular(sdp, structure_constants(sdp.orbits))
        elif backend == "block":
            bd = block_diagonalize(AlgebraBasis.from_orbits(sdp.orbits), seed=cfg.seed, config=cfg.algebra)
            problem = reduce_block(sdp, bd)
        else:
            raise ValueError(f"unknown backend {backend!r}")
    result = solve_sdp(problem, config=cfg.solver)
    result.info["backend"] = backend
    result.info["blocks"] = " ".join(str(s) for s in problem.block_struct)
    return result
