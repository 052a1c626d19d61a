from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import List

import numpy as np


def krawtchouk(i: int, x: int, n: int, q: int = 2) -> int:
    """P_i(x) = sum_k (-1)^k C(x, k) C(n - x, i - k) (q - 1)^(i - k), exactly."""
    if q < 2:
        raise ValueError(f"alphabet size q={q} must be at least 2")
    if not (0 <= i <= n and 0 <= x <= n):
        raise ValueError(f"need 0 <= i, x <= n, got i={i}, x={x}, n={n}")
    return sum((-1) ** k * comb(x, k) * comb(n - x, i - k) * (q - 1) ** (i - k) for k in range(i + 1))


@dataclass
class KrawtchoukTable:
    """values[i][j] = P_i(j) for 0 <= i, j <= n, as Python integers."""
    n: int
    q: int = 2
    values: List[List[int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.values:
            self.values = [[krawtchouk(i, j, self.n, self.q) for j in range(self.n + 1)] for i in range(self.n + 1)]

    def __call__(self, i: int, j: int) -> int:
        return self.values[i][j]

    def weights(self) -> List[int]:
        """Valencies binom(n, j)(q-1)^j, the eigenvalue multiplicities."""
        return [comb(self.n, j) * (self.q - 1) ** j for j in range(self.n + 1)]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def orthogonality_defect(self) -> int:
        """max |sum_j w_j P_i(j) P_i'(j)| over i != i' (0 for a correct table)."""
        w = self.weights()
        worst = 0
        for i in range(self.n + 1):
            for i2 in range(i + 1, self.n + 1):
                s = sum(w[j] * self.values[i][j] * self.values[i2][j] for j in range(self.n + 1))
                worst = max(worst, abs(s))
        return worst

    def norms(self) -> List[int]:
        """sum_j w_j P_i(j)^2 = q^n w_i."""
        w = self.weights()
        return [sum(w[j] * self.values[i][j] ** 2 for j in range(self.n + 1)) for i in range(self.n + 1)]
