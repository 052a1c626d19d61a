"""
Explicit spherical codes and their validators.
"""
from __future__ import annotations

import itertools
from typing import Optional

import numpy as np
from scipy.stats import ortho_group

from src.sphere.jacobi import JacobiFamily


def normalize(points) -> np.ndarray:
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("points must be a non-empty (N, n) array")
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector in point set")
    return X / norms[:, None]


def min_angle_cos(points) -> float:
    """Largest inner product between distinct unit vectors (cosine of the minimal angle); -1 for a single point."""
    X = normalize(points)
    if X.shape[0] == 1:
        return -1.0
    G = X @ X.T
    np.fill_diagonal(G, -np.inf)
    return float(np.clip(G.max(), -1.0, 1.0))


def is_code(points, theta: float, tol: float = 1e-9) -> bool:
    """True when all pairwise angles are at least theta (radians)."""
    return min_angle_cos(points) <= np.cos(theta) + tol


def random_rotation(points, seed: Optional[int] = None) -> np.ndarray:
    X = normalize(points)
    if X.shape[1] == 1:
        return X.copy()
    Q = ortho_group.rvs(dim=X.shape[1], random_state=seed)
    return X @ Q.T


def zonal_gram_min_eigenvalue(n: int, k: int, points) -> float:
    """Smallest eigenvalue of [P_k^n(x_i . x_j)], nonnegative up to rounding for any points on S^{n-1}."""
    X = normalize(points)
    if X.shape[1] != n:
        raise ValueError(f"points live in R^{X.shape[1]}, expected R^{n}")
    G = np.clip(X @ X.T, -1.0, 1.0)
    M = JacobiFamily.sphere(n)(k, G)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def random_points(n: int, N: int, seed: Optional[int] = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return normalize(rng.standard_normal((N, n)))


def simplex(n: int) -> np.ndarray:
    """n + 1 unit vectors in R^n with pairwise inner product -1/n."""
    if n < 1:
        raise ValueError(f"dimension n={n} must be at least 1")
    E = np.eye(n + 1) - 1.0 / (n + 1)
    # project onto the hyperplane sum = 0, then pick an orthonormal basis of it
    U, _, _ = np.linalg.svd(E)
    return normalize(E @ U[:, :n])


def cross_polytope(n: int) -> np.ndarray:
    I = np.eye(n)
    return np.vstack([I, -I])


def icosahedron() -> np.ndarray:
    """The 12 vertices of the icosahedron, minimal angle about 63.43 degrees."""
    phi = (1 + 5 ** 0.5) / 2
    pts = []
    for a, b in itertools.product((1.0, -1.0), repeat=2):
        pts += [(0.0, a, b * phi), (a, b * phi, 0.0), (b * phi, 0.0, a)]
    return normalize(pts)


def e8_roots() -> np.ndarray:
    """The 240 roots of E8 scaled to the unit sphere (minimal angle 60 degrees)."""
    pts = []
    for i, j in itertools.combinations(range(8), 2):
        for a, b in itertools.product((1.0, -1.0), repeat=2):
            v = np.zeros(8)
            v[i], v[j] = a, b
            pts.append(v)
    for signs in itertools.product((0.5, -0.5), repeat=8):
        if sum(s < 0 for s in signs) % 2 == 0:
            pts.append(np.array(signs))
    return normalize(pts)
