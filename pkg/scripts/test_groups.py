"""Permutation groups, pair orbits and structure constants."""
import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import TooLarge
from src.groups import GroupAction, Permutation, group_average, pair_orbits, structure_constants


def cyclic(n):
    return GroupAction(n, (Permutation.from_cycles(n, [list(range(n))]),))


def dihedral(n):
    flip = Permutation(tuple((-i) % n for i in range(n)))
    return GroupAction(n, (Permutation.from_cycles(n, [list(range(n))]), flip))


def test_permutation_compose_and_inverse():
    g = Permutation((1, 2, 0))
    h = Permutation((1, 0, 2))
    assert g.compose(h).images == (2, 1, 0)
    assert g.compose(g.inverse()).is_identity()
    assert np.array_equal(g.to_matrix() @ np.eye(3)[:, 0], np.eye(3)[:, 1])


def test_not_a_permutation():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_group_order_cap():
    assert len(GroupAction.symmetric(4).elements()) == 24
    with pytest.raises(TooLarge):
        GroupAction.symmetric(6).elements(limit=100)


def test_cyclic_pair_orbits():
    orbits = pair_orbits(cyclic(3))
    assert orbits.M == 3
    assert orbits.orbit_sizes.tolist() == [3, 3, 3]
    assert orbits.representatives == [(0, 0), (0, 1), (0, 2)]
    assert orbits.transpose_map.tolist() == [0, 2, 1]


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_symmetric_group_has_two_orbits(n):
    orbits = pair_orbits(GroupAction.symmetric(n))
    assert orbits.M == 2
    assert orbits.orbit_sizes.tolist() == [n, n * (n - 1)]


def test_trivial_group_gives_every_pair():
    orbits = pair_orbits(GroupAction.trivial(4))
    assert orbits.M == 16
    assert set(orbits.orbit_sizes.tolist()) == {1}


def test_orbit_sizes_partition_pairs():
    orbits = pair_orbits(dihedral(8))
    assert int(orbits.orbit_sizes.sum()) == 64
    # the dihedral group is generously transitive: every orbit is symmetric
    assert np.array_equal(orbits.transpose_map, np.arange(orbits.M))
    assert orbits.M == 5


def test_group_json_roundtrip(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 4, "generators": [[1, 2, 3, 0]]}))
    action = GroupAction.from_json(path)
    assert action.to_dict() == {"n": 4, "generators": [[1, 2, 3, 0]]}
    assert action.point_orbits() == [[0, 1, 2, 3]]


def test_structure_constants_of_complete_graph():
    sc = structure_constants(pair_orbits(GroupAction.symmetric(3)))
    # (J - I)^2 = 2 I + (J - I)
    assert sc.coefficient(1, 1, 0) == 2
    assert sc.coefficient(1, 1, 1) == 1
    assert sc.coefficient(0, 1, 1) == 1


@pytest.mark.parametrize("action", [cyclic(5), dihedral(6), GroupAction.symmetric(4)])
def test_structure_constants_reproduce_products(action):
    orbits = pair_orbits(action)
    sc = structure_constants(orbits, action, audit=True)
    C = [m.toarray() for m in orbits.canonical_matrices()]
    for r in range(orbits.M):
        for s in range(orbits.M):
            rhs = sum(sc.coefficient(r, s, t) * C[t] for t in range(orbits.M))
            assert np.array_equal(C[r] @ C[s], rhs)


def test_group_average_is_a_projection():
    orbits = pair_orbits(cyclic(5))
    X = np.random.default_rng(0).standard_normal((5, 5))
    Y = group_average(X, orbits)
    assert np.allclose(group_average(Y, orbits), Y)
    assert np.isclose(np.sum(X), np.sum(Y))
    P = Permutation.from_cycles(5, [list(range(5))]).to_matrix()
    assert np.allclose(P @ Y @ P.T, Y)
