"""Cyclic permutations, star crossings and the alpha_m program."""
import itertools
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.crossing import (
    alpha_m,
    crossing_bound,
    crossing_structure_constants,
    diagonal_crossings,
    enumerate_cyclic,
    orbit_structure,
    star_crossing,
    star_crossing_bruteforce,
    zarankiewicz,
)
from src.errors import TooLarge


@pytest.mark.parametrize("m, count", [(3, 2), (4, 6), (5, 24), (6, 120)])
def test_enumerate_cyclic_counts(m, count):
    cycles = enumerate_cyclic(m)
    assert len(cycles) == count
    assert all(c[0] == 1 for c in cycles)
    assert cycles == sorted(cycles)
    assert len(set(cycles)) == count


def test_enumerate_cyclic_rejects_out_of_range():
    with pytest.raises(ValueError):
        enumerate_cyclic(2)
    with pytest.raises(ValueError):
        enumerate_cyclic(10)


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_diagonal_is_floor_of_quarter_square(m):
    expected = (m - 1) ** 2 // 4
    assert diagonal_crossings(m) == expected
    for sigma in enumerate_cyclic(m)[:5]:
        assert star_crossing(sigma, sigma) == expected


def test_reversed_rotation_needs_no_crossings():
    sigma = (1, 3, 2, 5, 4)
    tau = tuple(reversed(sigma))
    assert star_crossing(sigma, tau) == 0


@pytest.mark.parametrize("m", [3, 4, 5])
def test_star_crossing_matches_bruteforce(m):
    cycles = enumerate_cyclic(m)
    for sigma, tau in itertools.product(cycles, repeat=2):
        assert star_crossing(sigma, tau) == star_crossing_bruteforce(sigma, tau)


def test_star_crossing_rejects_bad_rotations():
    with pytest.raises(ValueError):
        star_crossing((1, 2, 3), (1, 2, 3, 4))
    with pytest.raises(ValueError):
        star_crossing((1, 2, 2), (1, 2, 3))


def test_orbits_of_three():
    co = orbit_structure(3)
    assert co.orbits.M == 2
    assert co.orbits.n == 2
    assert sorted(co.crossing.tolist()) == [0.0, 1.0]
    assert int(co.orbits.orbit_sizes.sum()) == 4


@pytest.mark.parametrize("m", [4, 5])
def test_orbit_table_is_consistent(m):
    co = orbit_structure(m, explicit=True)
    N = co.space.size
    assert int(co.orbits.orbit_sizes.sum()) == N * N
    orbit_id = co.orbits.orbit_id
    assert np.array_equal(np.bincount(orbit_id.ravel(), minlength=co.orbits.M), co.orbits.orbit_sizes)
    # C is constant on orbits
    cycles = enumerate_cyclic(m)
    C = co.dense_crossing()
    for i, j in [(0, 1), (2, 3), (N - 1, 0)]:
        assert C[i, j] == star_crossing(cycles[i], cycles[j])
    # transposed pairs land in the transposed orbit
    assert np.array_equal(co.orbits.transpose_map[orbit_id], orbit_id.T)


def test_structure_constants_count_the_points():
    co = orbit_structure(5)
    sc = crossing_structure_constants(co)
    N = co.space.size
    total = sum(int(sc.mult[r].sum()) for r in range(sc.M))
    assert total == N * sc.M


def test_alpha_three():
    res = alpha_m(3)
    assert res.status == "optimal"
    assert res.alpha == pytest.approx(0.5, abs=1e-7)
    assert res.orbits == 2
    assert set(res.timings) >= {"orbits", "build", "solve"}
    assert res.to_dict()["block_size"] == 2


@pytest.mark.parametrize("m", [3, 4, 5])
def test_reduced_alpha_matches_dense(m):
    dense = alpha_m(m, backend="dense")
    reduced = alpha_m(m, backend="regular")
    assert reduced.block_size < dense.block_size or m == 3
    assert reduced.alpha == pytest.approx(dense.alpha, abs=1e-6)


def test_alpha_rejects_unknown_backend():
    with pytest.raises(ValueError):
        alpha_m(4, backend="sparse")


@pytest.mark.parametrize("m", [8, 9])
def test_large_m_needs_long(m):
    with pytest.raises(TooLarge):
        alpha_m(m)


def test_zarankiewicz_values():
    assert zarankiewicz(3, 5) == 4
    assert zarankiewicz(5, 5) == 16
    assert zarankiewicz(1, 7) == 0
    with pytest.raises(ValueError):
        zarankiewicz(0, 3)


def test_crossing_bound_for_three():
    for n in range(1, 31):
        b = crossing_bound(3, n, 0.5)
        assert b == pytest.approx(n * n / 4 - n / 2)
        assert math.ceil(b - 1e-9) <= zarankiewicz(3, n)
    with pytest.raises(ValueError):
        crossing_bound(3, 0, 0.5)


@pytest.mark.parametrize("m", [4, 5, 6, 7])
def test_crossing_bound_below_zarankiewicz(m):
    alpha = alpha_m(m).alpha
    for n in range(1, 31):
        assert crossing_bound(m, n, alpha) <= zarankiewicz(m, n) + 1e-6


@pytest.mark.long
def test_alpha_eight():
    assert alpha_m(8, long=True).alpha == pytest.approx(5.8599856444, abs=1e-4)


@pytest.mark.long
def test_alpha_nine():
    assert alpha_m(9, long=True).alpha == pytest.approx(7.7352126, abs=1e-3)
