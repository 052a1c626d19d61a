"""Regular *-representation and numerical block diagonalization."""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra import (
    AlgebraBasis,
    RegularRep,
    block_diagonalize,
    psd_decompose,
    regular_rep,
    verify_star_isomorphism,
)
from src.errors import NotAnAlgebra, NotPSD
from src.groups import GroupAction, Permutation, pair_orbits, structure_constants


def cyclic(n):
    return GroupAction(n, (Permutation.from_cycles(n, [list(range(n))]),))


def test_regular_rep_of_complete_graph_algebra():
    rep = regular_rep(structure_constants(pair_orbits(GroupAction.symmetric(3))))
    assert isinstance(rep, RegularRep) and rep.M == 2
    L1 = rep.matrix(1)
    # C_1 = J - I has eigenvalues 2 and -1 on span{I, J}
    assert np.allclose(sorted(np.linalg.eigvalsh(L1)), [-1.0, 2.0])
    assert np.allclose(rep.matrix(0), np.eye(2))


def conjugated(action, sigma):
    """The same group with point i renamed sigma[i]."""
    gens = []
    for g in action.generators:
        images = [0] * action.n
        for i, gi in enumerate(g.images):
            images[sigma[i]] = int(sigma[gi])
        gens.append(Permutation(tuple(images)))
    return GroupAction(action.n, tuple(gens))


def seeded_group(seed):
    """Cyclic, dihedral, symmetric, S_a x S_b or a random 2-generated group on at most 40 points."""
    rng = np.random.default_rng(seed)
    family = seed % 5
    if family == 0:
        action = cyclic(int(rng.integers(5, 25)))
    elif family == 1:
        n = int(rng.integers(5, 41))
        flip = Permutation(tuple((-i) % n for i in range(n)))
        action = GroupAction(n, (Permutation.from_cycles(n, [list(range(n))]), flip))
    elif family == 2:
        action = GroupAction.symmetric(int(rng.integers(3, 41)))
    elif family == 3:
        a, b = int(rng.integers(2, 20)), int(rng.integers(2, 20))
        n = a + b
        gens = [Permutation.from_cycles(n, [[0, 1]]), Permutation.from_cycles(n, [[a, a + 1]])]
        if a > 2:
            gens.append(Permutation.from_cycles(n, [list(range(a))]))
        if b > 2:
            gens.append(Permutation.from_cycles(n, [list(range(a, n))]))
        action = GroupAction(n, tuple(gens))
    else:
        n = int(rng.integers(4, 9))
        action = GroupAction(n, tuple(Permutation(tuple(int(v) for v in rng.permutation(n))) for _ in range(2)))
    return conjugated(action, rng.permutation(action.n))


@pytest.mark.parametrize("seed", range(20))
def test_regular_rep_is_a_star_homomorphism(seed):
    action = seeded_group(seed)
    assert action.n <= 40
    sc = structure_constants(pair_orbits(action))
    rep = RegularRep(sc)
    assert rep.exact_multiplicativity_error() == 0
    L = np.array(rep.L)
    P = np.array([m.toarray() for m in sc.mult])
    for r in range(sc.M):
        assert np.allclose(L[r].T, L[int(sc.transpose_map[r])], atol=1e-12)
        lhs = np.einsum("ab,sbc->sac", L[r], L)
        rhs = np.einsum("ts,tac->sac", P[r], L)
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(lhs).max())


@pytest.mark.parametrize("seed", range(20))
def test_block_diagonalization_of_seeded_groups(seed):
    orbits = pair_orbits(seeded_group(seed))
    sc = structure_constants(orbits)
    basis = AlgebraBasis.from_orbits(orbits)
    bd = block_diagonalize(basis, seed=seed)
    assert sum(m * m for m in bd.block_sizes) == basis.M
    assert bd.residual <= 1e-7
    # five random Hermitian elements keep their spectra, counted with multiplicity
    report = verify_star_isomorphism(
        bd.images, structure=sc, basis=basis, multiplicities=bd.multiplicities, kernel_dim=bd.kernel_dim, seed=seed
    )
    assert report.eigenvalue_error is not None
    assert report.eigenvalue_error <= 1e-7
    assert report.passed


@pytest.mark.parametrize("action", [cyclic(5), GroupAction.symmetric(3), GroupAction.trivial(3)])
def test_cluster_count_is_the_dimension_generated_by_a_sample(action):
    basis = AlgebraBasis.from_orbits(pair_orbits(action))
    bd = block_diagonalize(basis, seed=4)
    herm = basis.hermitian_generators()
    coeffs = np.random.default_rng(9).standard_normal(len(herm))
    A = sum(c * H.toarray() for c, H in zip(coeffs, herm))
    A = A / np.abs(np.linalg.eigvalsh(A)).max()
    powers = np.array([np.linalg.matrix_power(A, k).ravel() for k in range(basis.n + 1)])
    assert np.linalg.matrix_rank(powers, tol=1e-10) == sum(bd.block_sizes)


def test_block_diagonalize_commutative_algebra():
    basis = AlgebraBasis.from_orbits(pair_orbits(GroupAction.symmetric(3)))
    bd = block_diagonalize(basis, seed=1)
    assert bd.block_sizes == [1, 1]
    assert sorted(bd.multiplicities) == [1, 2]
    assert bd.residual <= 1e-7


def test_block_diagonalize_full_matrix_algebra():
    basis = AlgebraBasis.from_orbits(pair_orbits(GroupAction.trivial(3)))
    bd = block_diagonalize(basis, seed=1)
    assert bd.block_sizes == [3]
    assert bd.multiplicities == [1]


def test_cyclic_algebra_splits_into_characters():
    basis = AlgebraBasis.from_orbits(pair_orbits(cyclic(5)))
    bd = block_diagonalize(basis, seed=3)
    assert bd.block_sizes == [1] * 5
    assert sum(m * m for m in bd.block_sizes) == basis.M
    report = verify_star_isomorphism(bd.images, basis=basis, multiplicities=bd.multiplicities)
    assert report.passed


def test_image_and_preimage_are_inverse():
    orbits = pair_orbits(GroupAction(6, (Permutation((1, 0, 3, 2, 5, 4)),)))
    basis = AlgebraBasis.from_orbits(orbits)
    bd = block_diagonalize(basis, seed=2)
    assert sum(m * m for m in bd.block_sizes) == basis.M
    Z = basis.combination(np.random.default_rng(5).standard_normal(basis.M))
    assert np.abs(bd.preimage(bd.image(Z)) - Z).max() <= 1e-8


def test_not_an_algebra():
    A = np.zeros((2, 2))
    A[0, 1] = 1.0
    with pytest.raises(NotAnAlgebra):
        block_diagonalize(AlgebraBasis.from_dense([np.eye(2), A]))


def test_psd_decompose():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    B = psd_decompose(A)
    assert np.allclose(B.conj().T @ B, A)
    with pytest.raises(NotPSD):
        psd_decompose(np.diag([1.0, -1.0]))
