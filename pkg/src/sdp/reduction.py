"""
From a G-invariant SDP to smaller equivalent programs.

restrict_to_invariant  project the data onto the invariant algebra (orbit coordinates)
to_sdpa                orbit-coordinate program with the original n x n block
reduce_regular         the n x n block replaced by the regular *-representation (size M)
reduce_block           the n x n block replaced by the blocks of a *-isomorphism
reduce_sdpa            the same two reductions applied to the data of an SDPA file
dense_sdp              the unreduced program over all entries of X
"""
from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.algebra.basis import AlgebraBasis
from src.algebra.blockdiag import BlockDiagonalization, block_diagonalize
from src.algebra.regular import RegularRep
from src.errors import NotInvariant, UnverifiedIsomorphism
from src.groups.orbits import PairOrbitStructure, StructureConstants, pair_orbits, structure_constants
from src.groups.permutation import GroupAction
from src.sdp.problem import InvariantSDP, LinearSDPBuilder, SDPAProblem

logger = logging.getLogger(__name__)


def _dense(A) -> np.ndarray:
    return A.toarray() if sparse.issparse(A) else np.asarray(A)


def _first_broken_generator(A: np.ndarray, action: GroupAction, tol: float) -> Optional[int]:
    scale = max(1.0, float(np.abs(A).max()))
    for k, g in enumerate(action.generator_array()):
        # (gAg^-1)[g(i), g(j)] = A[i, j]
        moved = np.empty_like(A)
        moved[np.ix_(g, g)] = A
        if np.abs(moved - A).max() > tol * scale:
            return k
    return None


def _constraint_set_closed(As: List[np.ndarray], b: Sequence[float], action: GroupAction, tol: float) -> Optional[int]:
    keys = {}
    for A, rhs in zip(As, b):
        keys.setdefault(np.round(A, 9).tobytes() + np.round(float(rhs), 9).hex().encode(), True)
    for k, g in enumerate(action.generator_array()):
        for A, rhs in zip(As, b):
            moved = np.empty_like(A)
            moved[np.ix_(g, g)] = A
            if np.round(moved, 9).tobytes() + np.round(float(rhs), 9).hex().encode() not in keys:
                return k
    return None


def restrict_to_invariant(
    C,
    A: Sequence,
    b: Sequence[float],
    action: GroupAction,
    *,
    nonnegative: bool = False,
    maximize: bool = True,
    tol: float = 1e-9,
    orbits: Optional[PairOrbitStructure] = None,
) -> InvariantSDP:
    """
    max/min <C, X> s.t. <A_i, X> = b_i, X psd (and X >= 0) over invariant X.

    C must be invariant under every generator; the constraint set may be
    permuted among itself. Either failure raises NotInvariant naming the
    generator.
    """
    C = _dense(C)
    As = [_dense(Ai) for Ai in A]
    n = action.n
    for M_ in [C, *As]:
        if M_.shape != (n, n):
            raise ValueError(f"data matrix of shape {M_.shape}, expected {(n, n)}")
    if len(As) != len(b):
        raise ValueError(f"{len(As)} constraint matrices but {len(b)} right-hand sides")
    k = _first_broken_generator(C, action, tol)
    if k is not None:
        raise NotInvariant(f"objective matrix is not invariant under generator {k}", generator=k)
    individually = all(_first_broken_generator(Ai, action, tol) is None for Ai in As)
    if not individually:
        k = _constraint_set_closed(As, b, action, tol)
        if k is not None:
            raise NotInvariant(f"constraint set is not closed under generator {k}", generator=k)

    orbits = orbits or pair_orbits(action)
    if orbits.M >= n * n and n > 1:
        logger.warning("reduction is not profitable: %d orbits for n=%d", orbits.M, n)
    sizes = orbits.orbit_sizes
    c = orbits.coordinates(C) * sizes
    constraints = [(orbits.coordinates(Ai) * sizes, float(bi)) for Ai, bi in zip(As, b)]
    return InvariantSDP(
        orbits=orbits,
        c=c,
        constraints=constraints,
        nonnegative=np.full(orbits.M, nonnegative),
        maximize=maximize,
    )


def _finish(problem: SDPAProblem, sdp: InvariantSDP, T: np.ndarray, step: str) -> SDPAProblem:
    problem.meta.update({"orbit_map": T, "step": step, "M": sdp.M, "n": sdp.orbits.n})
    return problem


def to_sdpa(sdp: InvariantSDP) -> SDPAProblem:
    """Orbit-coordinate program keeping the original n x n psd block."""
    labels, T = sdp.variables()
    builder = sdp.builder(T, labels)
    C = sdp.orbits.canonical_matrices()
    terms = {}
    for v, row in enumerate(T):
        terms[v] = sum((coef * C[r].toarray() for r, coef in enumerate(row) if coef != 0), np.zeros((sdp.orbits.n,) * 2))
    builder.add_lmi(terms, label="X")
    return _finish(builder.build(), sdp, T, "1")


def reduce_regular(sdp: InvariantSDP, sc: StructureConstants) -> SDPAProblem:
    """The n x n block replaced by sum_v y_v L(S_v), a single block of size M."""
    if sc.M != sdp.M:
        raise ValueError(f"structure constants for {sc.M} orbits, program has {sdp.M}")
    n = sdp.orbits.n
    if sdp.M >= n * n and n > 1:
        logger.warning("regular representation of size %d is not smaller than n=%d", sdp.M, n)
    rep = RegularRep(sc)
    labels, T = sdp.variables()
    builder = sdp.builder(T, labels)
    builder.add_lmi({v: rep.image(row) for v, row in enumerate(T)}, label="L")
    return _finish(builder.build(), sdp, T, "1.5")


def _block_terms(bd: BlockDiagonalization, T: np.ndarray, k: int) -> dict:
    return {v: sum(coef * bd.images[r][k] for r, coef in enumerate(row) if coef != 0) for v, row in enumerate(T)}


def reduce_block(
    sdp: InvariantSDP,
    bd: BlockDiagonalization,
    mode: str = "coefficient",
    tol: float = 1e-6,
) -> SDPAProblem:
    """
    The n x n block replaced by the d blocks of phi.

    coefficient   sum_v y_v phi_k(S_v) >= 0 for every k, over the orbit variables
    parametrized  psd variables X_k, with x_r = sum_k s_k Re<X_k, phi_k(C_r)> / |R_r|
    """
    if bd.M != sdp.M:
        raise ValueError(f"block diagonalization of a {bd.M}-dimensional algebra, program has {sdp.M}")
    if not bd.residual <= tol:
        raise UnverifiedIsomorphism(f"isomorphism residual {bd.residual:.2e} exceeds {tol:.2e}")
    if mode == "coefficient":
        labels, T = sdp.variables()
        builder = sdp.builder(T, labels)
        for k in range(bd.d):
            builder.add_lmi(_block_terms(bd, T, k), label=f"block{k}")
        return _finish(builder.build(), sdp, T, "2")
    if mode != "parametrized":
        raise ValueError(f"unknown reduction mode {mode!r}")

    # one real parameter per Re X_k[u, v] (u <= v) and, for complex blocks, Im X_k[u, v] (u < v)
    params: List[Tuple[int, int, int, bool]] = []
    for k, m in enumerate(bd.block_sizes):
        real = bd.block_is_real(k)
        for u in range(m):
            for v in range(u, m):
                params.append((k, u, v, False))
                if not real and u < v:
                    params.append((k, u, v, True))
    labels = [f"X{k}[{u},{v}]" + (".im" if im else "") for k, u, v, im in params]
    sizes = sdp.orbits.orbit_sizes
    # T[p, r]: x_r in terms of parameter p
    T = np.zeros((len(params), sdp.M), dtype=complex)
    for p, (k, u, v, im) in enumerate(params):
        s = bd.multiplicities[k]
        E = np.zeros((bd.block_sizes[k],) * 2, dtype=complex)
        if im:
            E[u, v], E[v, u] = 1j, -1j
        else:
            E[u, v] = E[v, u] = 1.0
        for r in range(sdp.M):
            T[p, r] = s * np.sum(np.conj(bd.images[r][k]) * E) / sizes[r]
    if sdp.is_real:
        T = T.real
    builder = sdp.builder(T, labels)
    for k, m in enumerate(bd.block_sizes):
        terms = {}
        for p, (kk, u, v, im) in enumerate(params):
            if kk != k:
                continue
            E = np.zeros((m, m), dtype=complex if im else float)
            if im:
                E[u, v], E[v, u] = 1j, -1j
            else:
                E[u, v] = E[v, u] = 1.0
            terms[p] = E
        builder.add_lmi(terms, label=f"X{k}")
    return _finish(builder.build(), sdp, T, "2p")


def orbit_solution(problem: SDPAProblem, x: np.ndarray) -> np.ndarray:
    """Orbit coordinates x_r of the invariant matrix recovered from a reduced solution."""
    T = problem.meta.get("orbit_map")
    if T is None:
        raise ValueError("problem carries no orbit map")
    coords = np.asarray(T).T @ problem.lifted(x)
    return coords.real if np.isrealobj(T) else coords


def reconstruct(problem: SDPAProblem, x: np.ndarray, orbits: PairOrbitStructure) -> np.ndarray:
    """X = sum_r x_r C_r."""
    return orbits.from_coordinates(orbit_solution(problem, x))


def dense_sdp(
    C,
    constraints: Sequence[Tuple[object, float]],
    *,
    nonnegative: bool = False,
    maximize: bool = True,
) -> SDPAProblem:
    """Unreduced program over all entries X_ij (i <= j) of a real symmetric X."""
    C = _dense(C).real
    n = C.shape[0]
    iu, ju = np.triu_indices(n)
    nv = iu.size
    weight = lambda A: np.where(iu == ju, A[iu, ju], A[iu, ju] + A[ju, iu])  # noqa: E731
    builder = LinearSDPBuilder(nv, [f"X[{i},{j}]" for i, j in zip(iu, ju)])
    builder.set_objective(weight(C), maximize=maximize)
    for A, rhs in constraints:
        builder.add_equality(weight(_dense(A).real), rhs)
    if nonnegative:
        builder.add_nonnegative(range(nv))
    terms = {}
    for v, (i, j) in enumerate(zip(iu, ju)):
        if i == j:
            terms[v] = sparse.csr_matrix(([1.0], ([i], [i])), shape=(n, n))
        else:
            terms[v] = sparse.csr_matrix(([1.0, 1.0], ([i, j], [j, i])), shape=(n, n))
    builder.add_lmi(terms, label="X")
    problem = builder.build()
    problem.meta.update({"step": "dense", "n": n})
    return problem


def _file_block_images(
    problem: SDPAProblem,
    action: GroupAction,
    step: str,
    seed: int,
    tol: float,
) -> SDPAProblem:
    n = action.n
    orbits = pair_orbits(action)
    sizes = orbits.orbit_sizes
    if step == "regular":
        rep = RegularRep(structure_constants(orbits))
        bd = None
    elif step == "block":
        rep = None
        bd = block_diagonalize(AlgebraBasis.from_orbits(orbits), seed=seed)
        if not bd.residual <= 1e-6:
            raise UnverifiedIsomorphism(f"isomorphism residual {bd.residual:.2e}")
    else:
        raise ValueError(f"unknown reduction step {step!r}")

    m = problem.m
    builder = LinearSDPBuilder(m, problem.labels or None)
    builder.set_objective(problem.c, maximize=False)
    reduced_any = False
    for blk_no, blk in enumerate(problem.blocks, start=1):
        mats = [blk.matrix(i) for i in range(m + 1)]
        if blk.diagonal or blk.size != n:
            if blk.diagonal:
                for idx in range(blk.size):
                    row = np.array([mats[i][idx, idx] for i in range(1, m + 1)])
                    builder.add_inequality(row, mats[0][idx, idx])
            else:
                builder.add_lmi({i - 1: mats[i] for i in range(1, m + 1)}, constant=mats[0])
            continue
        coords = []
        for i, F in enumerate(mats):
            f = orbits.coordinates(F)
            if np.abs(orbits.from_coordinates(f) - F).max() > tol * max(1.0, float(np.abs(F).max())):
                raise NotInvariant(f"block {blk_no}, matrix {i} is not invariant under the group")
            coords.append(f)
        reduced_any = True
        if rep is not None:
            images = [[rep.image(f)] for f in coords]
        else:
            images = [bd.image_of_coefficients(f) for f in coords]
        for k in range(len(images[0])):
            builder.add_lmi({i - 1: images[i][k] for i in range(1, m + 1)}, constant=images[0][k])
    if not reduced_any:
        logger.warning("no block of size %d in the problem; nothing was reduced", n)
    out = builder.build()
    out.objective_sign, out.offset = problem.objective_sign, problem.offset + out.offset
    out.meta.update({"step": "1.5" if step == "regular" else "2", "M": orbits.M, "n": n})
    return out


def reduce_sdpa(problem: SDPAProblem, action: GroupAction, step: str = "block", seed: int = 1, tol: float = 1e-9) -> SDPAProblem:
    """
    Reduce every invariant n x n block of an SDPA problem.

    Each F_i restricted to the block is written as sum_r f_r C_r with
    f_r = <C_r, F_i> / |R_r| and replaced by sum_r f_r L(C_r) (step
    "regular") or by the blocks sum_r f_r phi_k(C_r) (step "block"). The
    variables are unchanged, so the optimum is too.
    """
    return _file_block_images(problem, action, step, seed, tol)
