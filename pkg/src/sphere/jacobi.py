from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, Tuple

import numpy as np


@dataclass(frozen=True)
class JacobiFamily:
    """
    Jacobi polynomials P_k^(alpha, beta) normalized by P_k(1) = 1.

    For alpha = beta = (n - 3) / 2 these are the zonal polynomials P_k^n of
    the unit sphere S^{n-1}.
    """
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= -1 or self.beta <= -1:
            raise ValueError(f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})")

    @classmethod
    def sphere(cls, n: int) -> "JacobiFamily":
        """P_k^n, orthogonal for (1 - t^2)^((n-3)/2) on [-1, 1]."""
        if n < 2:
            raise ValueError(f"sphere dimension n={n} must be at least 2")
        a = (n - 3) / 2
        return cls(a, a)

    def values(self, K: int, t) -> np.ndarray:
        """(K + 1, *shape(t)) array of P_0(t) .. P_K(t)."""
        t = np.asarray(t, dtype=float)
        a, b = self.alpha, self.beta
        out = np.empty((K + 1,) + t.shape)
        one = np.empty(K + 1)
        out[0], one[0] = 1.0, 1.0
        if K >= 1:
            out[1] = (a + 1) + (a + b + 2) * (t - 1) / 2
            one[1] = a + 1
        for k in range(2, K + 1):
            s = 2 * k + a + b
            c0 = 2 * k * (k + a + b) * (s - 2)
            c1 = (s - 1) * s * (s - 2)
            c2 = (s - 1) * (a * a - b * b)
            c3 = 2 * (k + a - 1) * (k + b - 1) * s
            # unnormalized recurrence applied to normalized values, rescaled by the values at 1
            out[k] = ((c1 * t + c2) * out[k - 1] * one[k - 1] - c3 * out[k - 2] * one[k - 2]) / c0
            one[k] = ((c1 + c2) * one[k - 1] - c3 * one[k - 2]) / c0
            out[k] /= one[k]
        return out

    def __call__(self, k: int, t):
        if k < 0:
            raise ValueError(f"degree k={k} must be nonnegative")
        return self.values(k, t)[k]

    def coefficients(self, k: int) -> np.ndarray:
        """Power-basis coefficients of P_k, lowest degree first."""
        return np.array([float(c) for c in jacobi_coefficients(k, self.alpha, self.beta)])


def jacobi(k: int, t, alpha: float, beta: float):
    return JacobiFamily(alpha, beta)(k, t)


@lru_cache(maxsize=256)
def _exact(k: int, a: Fraction, b: Fraction) -> Tuple[Fraction, ...]:
    polys: List[List[Fraction]] = [[Fraction(1)]]
    if k >= 1:
        polys.append([(a + 1) - (a + b + 2) / 2, (a + b + 2) / 2])
    for j in range(2, k + 1):
        s = 2 * j + a + b
        c0 = 2 * j * (j + a + b) * (s - 2)
        c1 = (s - 1) * s * (s - 2)
        c2 = (s - 1) * (a * a - b * b)
        c3 = 2 * (j + a - 1) * (j + b - 1) * s
        prev, prev2 = polys[j - 1], polys[j - 2]
        new = [Fraction(0)] * (j + 1)
        for i, c in enumerate(prev):
            new[i + 1] += c1 * c
            new[i] += c2 * c
        for i, c in enumerate(prev2):
            new[i] -= c3 * c
        polys.append([c / c0 for c in new])
    p = polys[k]
    at_one = sum(p)
    return tuple(c / at_one for c in p)


def jacobi_coefficients(k: int, alpha: float, beta: float) -> List[Fraction]:
    """Exact power-basis coefficients of the normalized P_k (alpha, beta taken as exact binary fractions)."""
    if alpha <= -1 or beta <= -1:
        raise ValueError(f"Jacobi parameters must exceed -1, got ({alpha}, {beta})")
    return list(_exact(int(k), Fraction(alpha), Fraction(beta)))


def harmonic_dimension(n: int, k: int) -> int:
    """h_k^n = binom(n+k-1, k) - binom(n+k-3, k-2), the dimension of Harm_k(R^n)."""
    if n < 2 or k < 0:
        raise ValueError(f"need n >= 2 and k >= 0, got n={n}, k={k}")
    return comb(n + k - 1, k) - (comb(n + k - 3, k - 2) if k >= 2 else 0)
