from .codes import (
    cross_polytope,
    e8_roots,
    icosahedron,
    is_code,
    min_angle_cos,
    random_points,
    random_rotation,
    simplex,
    zonal_gram_min_eigenvalue,
)
from .jacobi import JacobiFamily, harmonic_dimension, jacobi, jacobi_coefficients
from .lp import AngleAvoidance, SphereLPBound, chebyshev_grid, delsarte_lp_sphere, theta2_avoid_angle
from .three_point import ThreePointBound, sk_symmetrize, three_point_sdp, yk_eval

__all__ = [
    "AngleAvoidance",
    "JacobiFamily",
    "SphereLPBound",
    "ThreePointBound",
    "chebyshev_grid",
    "cross_polytope",
    "delsarte_lp_sphere",
    "e8_roots",
    "harmonic_dimension",
    "icosahedron",
    "is_code",
    "jacobi",
    "jacobi_coefficients",
    "min_angle_cos",
    "random_points",
    "random_rotation",
    "simplex",
    "sk_symmetrize",
    "theta2_avoid_angle",
    "three_point_sdp",
    "yk_eval",
]
