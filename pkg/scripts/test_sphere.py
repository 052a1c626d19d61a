"""Zonal polynomials, spherical-code validators, the sphere LP and the three-point program."""
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.special import roots_jacobi

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import NoNegativeValue
from src.sphere import (
    JacobiFamily,
    cross_polytope,
    delsarte_lp_sphere,
    e8_roots,
    harmonic_dimension,
    icosahedron,
    is_code,
    jacobi,
    jacobi_coefficients,
    min_angle_cos,
    random_points,
    random_rotation,
    simplex,
    sk_symmetrize,
    theta2_avoid_angle,
    three_point_sdp,
    yk_eval,
    zonal_gram_min_eigenvalue,
)
from src.sphere.three_point import box_points, q_poly, realizable, segment_points


@pytest.mark.parametrize("n", [3, 4, 8, 24])
def test_zonal_polynomials_are_one_at_one(n):
    fam = JacobiFamily.sphere(n)
    assert np.allclose(fam.values(50, 1.0), 1.0, atol=1e-12)
    a = Fraction((n - 3), 2)
    for k in (0, 1, 5, 12):
        assert sum(jacobi_coefficients(k, float(a), float(a))) == 1


def test_legendre_special_values():
    fam = JacobiFamily.sphere(3)
    assert fam(2, 0.0) == pytest.approx(-0.5)
    assert fam(3, 0.5) == pytest.approx(-0.4375)
    assert np.allclose(fam.coefficients(2), [-0.5, 0.0, 1.5])


@pytest.mark.parametrize("n", [3, 5, 8])
def test_parity(n):
    fam = JacobiFamily.sphere(n)
    t = np.linspace(-1, 1, 11)
    for k in range(8):
        assert np.allclose(fam(k, -t), (-1) ** k * fam(k, t), atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 8])
def test_orthogonality_under_the_sphere_weight(n):
    a = (n - 3) / 2
    nodes, weights = roots_jacobi(30, a, a)
    P = JacobiFamily.sphere(n).values(8, nodes)
    G = (P * weights) @ P.T
    off = G - np.diag(np.diag(G))
    assert np.abs(off).max() <= 1e-10 * np.abs(np.diag(G)).max()


def test_harmonic_dimensions():
    assert harmonic_dimension(3, 2) == 5
    assert harmonic_dimension(8, 1) == 8
    assert [harmonic_dimension(4, k) for k in range(5)] == [(k + 1) ** 2 for k in range(5)]


@pytest.mark.parametrize("n, k", [(3, 2), (4, 3), (8, 4)])
def test_zonal_gram_matrices_are_psd(n, k):
    assert zonal_gram_min_eigenvalue(n, k, random_points(n, 40, seed=k)) >= -1e-9


def test_explicit_codes():
    ico = icosahedron()
    assert ico.shape == (12, 3)
    assert is_code(ico, math.radians(63.4))
    assert not is_code(ico, math.radians(63.5))
    e8 = e8_roots()
    assert e8.shape == (240, 8)
    assert min_angle_cos(e8) == pytest.approx(0.5)
    assert min_angle_cos(simplex(5)) == pytest.approx(-0.2)
    assert min_angle_cos(cross_polytope(4)) == pytest.approx(0.0)
    assert min_angle_cos([[0.0, 2.0]]) == -1.0
    assert min_angle_cos(random_rotation(ico, seed=3)) == pytest.approx(min_angle_cos(ico))


def test_avoid_angle_values():
    assert theta2_avoid_angle(3, math.pi / 2).value == pytest.approx(1 / 3, abs=1e-9)
    opposite = theta2_avoid_angle(3, math.pi)
    assert opposite.value == pytest.approx(0.5)
    assert opposite.settled
    with pytest.raises(NoNegativeValue):
        theta2_avoid_angle(3, 0.1, K_search=1)


@pytest.mark.parametrize("certify", ["grid", "sos"])
def test_sphere_lp_cross_polytope_is_tight(certify):
    bound = delsarte_lp_sphere(3, math.pi / 2, 3, certify=certify)
    assert bound.bound == pytest.approx(6.0, abs=1e-4)
    assert bound.certified


def test_sphere_lp_tetrahedron():
    bound = delsarte_lp_sphere(3, math.acos(-1 / 3), 2, certify="sos")
    assert bound.bound == pytest.approx(4.0, abs=1e-4)


def test_sphere_lp_infeasible_truncation():
    assert delsarte_lp_sphere(3, math.pi / 2, 1).bound == math.inf


def test_sphere_lp_rejects_bad_angle():
    with pytest.raises(ValueError):
        delsarte_lp_sphere(3, 0.0, 3)


@pytest.mark.parametrize("n, d", [(3, 4), (5, 3), (8, 6)])
def test_three_point_matrices_at_the_pole(n, d):
    assert np.allclose(sk_symmetrize(n, d, 0, 1.0, 1.0, 1.0), np.ones((d + 1, d + 1)))
    for k in range(1, d + 1):
        assert np.allclose(sk_symmetrize(n, d, k, 1.0, 1.0, 1.0), 0.0)


@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_q_on_the_diagonal(k):
    u = np.linspace(-1, 0.5, 7)
    assert np.allclose(q_poly(4, k, u, u, np.ones_like(u)), (1 - u * u) ** k)


def test_q_limit_at_the_boundary():
    assert np.allclose(yk_eval(4, 3, 2, 1.0, 0.3, 0.3), 0.0)
    assert not np.allclose(yk_eval(4, 3, 2, 1.0, 0.3, 0.1, limit=False), 0.0)
    with pytest.raises(ValueError):
        yk_eval(2, 3, 1, 0.1, 0.2, 0.3)


def test_three_point_matrices_sum_to_psd_over_a_code():
    # sum over pairs (y, z) of a code of Y_k(x.y, x.z, y.z) is psd for every x
    pts = icosahedron()
    G = np.clip(pts @ pts.T, -1, 1)
    x = 0
    for k in range(4):
        total = sum(yk_eval(3, 4, k, G[x, y], G[x, z], G[y, z], limit=True) for y in range(12) for z in range(12))
        assert np.linalg.eigvalsh(0.5 * (total + total.T))[0] >= -1e-8


def test_grids():
    box = box_points(0.5, 6)
    assert len(box) == 56
    assert np.all(np.diff(box, axis=1) >= 0)
    assert len(box_points(0.5, 6, domain="realizable")) < len(box)
    assert realizable(np.array([[0.5, 0.5, 0.5], [-1.0, -1.0, -1.0]])).tolist() == [True, False]
    seg = segment_points(0.5, 10)
    assert np.all(seg[:, 2] == 1.0)
    with pytest.raises(ValueError):
        box_points(0.5, 6, domain="ball")


def test_three_point_small_run():
    tp = three_point_sdp(3, math.radians(90), 3, grid_density=12, segment_density=50)
    assert tp.grid_relaxed
    info = tp.to_dict()
    assert info["theta_deg"] == pytest.approx(90.0)
    assert info["degree"] == 3
    assert 0 < info["box_points"] <= len(box_points(0.0, 12))
    assert info["segment_points"] == 50


@pytest.mark.long
def test_three_point_at_most_the_octahedron_bound():
    tp = three_point_sdp(3, math.radians(90), 3)
    assert tp.status == "optimal"
    assert tp.bound <= 6 + 1e-3


@pytest.mark.long
def test_three_point_kissing_in_three_dimensions():
    tp = three_point_sdp(3, math.radians(60), 10)
    assert tp.bound < 13
    assert tp.audit_passed


@pytest.mark.long
def test_sphere_lp_e8():
    bound = delsarte_lp_sphere(8, math.radians(60), 11, certify="sos")
    assert 240 - 1e-6 <= bound.bound <= 240.01


def test_jacobi_matches_the_family():
    # alpha = beta = 0 gives Legendre polynomials, P_2(t) = (3t^2 - 1) / 2
    assert jacobi(2, 0.5, 0.0, 0.0) == pytest.approx(-0.125, abs=1e-12)
    assert jacobi(0, 0.3, 1.5, 1.5) == pytest.approx(1.0)
    fam = JacobiFamily(1.5, 1.5)
    assert jacobi(5, -0.2, 1.5, 1.5) == pytest.approx(fam(5, -0.2), abs=1e-12)
    with pytest.raises(ValueError):
        jacobi(-1, 0.0, 0.0, 0.0)
