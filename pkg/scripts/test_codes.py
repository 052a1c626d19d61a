"""Krawtchouk polynomials, Delsarte LP, Terwilliger algebra and the triple bound."""
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra import AlgebraBasis, RegularRep, block_diagonalize
from src.codes import (
    HammingSpace,
    KrawtchoukTable,
    delsarte_lp,
    distance_basis,
    even_weight_code,
    hamming_action,
    krawtchouk,
    min_distance,
    repetition_code,
    schrijver_triple_sdp,
    terwilliger_block_sizes,
    terwilliger_orbits,
    terwilliger_structure_constants,
    triple_orbit_index,
)
from src.groups import structure_constants
from src.sdp.theta import solve_theta


def test_krawtchouk_values():
    assert krawtchouk(0, 2, 5) == 1
    assert krawtchouk(1, 2, 5) == 1
    assert krawtchouk(2, 0, 5, q=3) == comb(5, 2) * 4
    with pytest.raises(ValueError):
        krawtchouk(1, 1, 3, q=1)


@pytest.mark.parametrize("n, q", [(4, 2), (7, 2), (5, 3), (10, 2)])
def test_krawtchouk_orthogonality(n, q):
    table = KrawtchoukTable(n, q)
    assert table.orthogonality_defect() == 0
    assert table.norms() == [q ** n * w for w in table.weights()]


@pytest.mark.parametrize(
    "n, q",
    [(n, 2) for n in range(2, 9)]
    + [(n, 3) for n in range(2, 7)]
    + [pytest.param(9, 2, marks=pytest.mark.long), pytest.param(10, 2, marks=pytest.mark.long), pytest.param(7, 3, marks=pytest.mark.long)],
)
def test_distance_matrices_have_krawtchouk_spectra(n, q):
    basis = distance_basis(HammingSpace(q, n))
    table = KrawtchoukTable(n, q)
    for i in range(n + 1):
        got = np.sort(np.linalg.eigvalsh(basis.dense(i).real))
        want = np.sort(np.repeat([table(i, j) for j in range(n + 1)], table.weights()))
        assert np.abs(got - want).max() <= 1e-8


def test_delsarte_small_cases():
    assert delsarte_lp(3, 3).bound == 2
    assert delsarte_lp(4, 1, q=3).bound == 81
    assert delsarte_lp(6, 2).bound == 32
    assert isinstance(delsarte_lp(5, 3).bound, Fraction)
    with pytest.raises(ValueError):
        delsarte_lp(3, 4)


def test_delsarte_distribution_is_normalized():
    lp = delsarte_lp(7, 3)
    assert lp.distribution[0] == 1
    assert all(x == 0 for x in lp.distribution[1:3])
    assert sum(comb(7, i) * x for i, x in enumerate(lp.distribution)) == lp.bound


@pytest.mark.parametrize("n, d", [(n, d) for n in (3, 4) for d in range(1, n + 1)])
def test_delsarte_equals_reduced_theta_prime(n, d):
    space = HammingSpace(2, n)
    result = solve_theta(space.graph_edges(d), space.size, hamming_action(space), backend="regular")
    assert abs(result.objective - float(delsarte_lp(n, d).bound)) <= 1e-5


def test_explicit_codes():
    assert min_distance(repetition_code(5)) == 5
    assert min_distance(even_weight_code(4)) == 2
    assert len(even_weight_code(4)) == 8
    assert min_distance([[0, 1, 1]]) == 4


@pytest.mark.parametrize("n", range(1, 21))
def test_terwilliger_dimension(n):
    assert triple_orbit_index(n).M == comb(n + 3, 3)
    assert sum(m * m for m in terwilliger_block_sizes(n)) == comb(n + 3, 3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_terwilliger_counts_match_explicit_orbits(n):
    orbits = terwilliger_orbits(n, explicit=True)
    assert int(orbits.orbit_sizes.sum()) == 4 ** n
    fast = terwilliger_structure_constants(n)
    slow = structure_constants(orbits)
    for r in range(orbits.M):
        assert np.array_equal(fast.mult[r].toarray(), slow.mult[r].toarray())


@pytest.mark.parametrize("n", [2, 3, 4])
def test_terwilliger_blocks_explicit(n):
    bd = block_diagonalize(AlgebraBasis.from_orbits(terwilliger_orbits(n, explicit=True)), seed=1)
    assert sorted(bd.block_sizes) == sorted(terwilliger_block_sizes(n))


@pytest.mark.parametrize("n", [5, 6, pytest.param(7, marks=pytest.mark.long), pytest.param(8, marks=pytest.mark.long)])
def test_terwilliger_blocks_from_regular_rep(n):
    rep = RegularRep(terwilliger_structure_constants(n))
    bd = block_diagonalize(AlgebraBasis.from_dense(rep.L), seed=1)
    assert sorted(bd.block_sizes) == sorted(terwilliger_block_sizes(n))


@pytest.mark.parametrize("n, d", [(4, 2), (5, 3), (6, 3), (6, 4), (7, 3), (7, 4)])
def test_triple_bound_between_codes_and_delsarte(n, d):
    tb = schrijver_triple_sdp(n, d)
    assert tb.bound <= float(delsarte_lp(n, d).bound) + 1e-5
    assert tb.bound >= 2 - 1e-6
    if d == 2:
        assert tb.bound >= 2 ** (n - 1) - 1e-5


def test_triple_backends_agree():
    a = schrijver_triple_sdp(5, 3, backend="regular")
    b = schrijver_triple_sdp(5, 3, backend="blockdiag")
    assert abs(a.bound - b.bound) <= 1e-5
    assert max(b.block_struct) <= max(a.block_struct)


@pytest.mark.long
@pytest.mark.parametrize("n, d", [(8, 3), (9, 4), (10, 3), (10, 4)])
def test_triple_bound_dominance_long(n, d):
    tb = schrijver_triple_sdp(n, d)
    assert tb.bound <= float(delsarte_lp(n, d).bound) + 1e-5
