from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from numbers import Number
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import sympy

Exponent = Tuple[int, ...]


@lru_cache(maxsize=64)
def _monomials(n: int, d: int) -> Tuple[Exponent, ...]:
    out: List[Exponent] = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


def monomials(n: int, d: int) -> List[Exponent]:
    """
    Exponents of all monomials of degree <= d in graded-lex order:
    1, x1, .., xn, x1^2, x1 x2, .., xn^2, ... (binom(n+d, d) of them).
    """
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    return list(_monomials(n, d))


def monomial_index(n: int, d: int) -> Dict[Exponent, int]:
    return {e: i for i, e in enumerate(_monomials(n, d))}


def product_index(n: int, d: int) -> np.ndarray:
    """idx[a, b] = position of z_a z_b among the monomials of degree <= 2d."""
    basis = _monomials(n, d)
    pos = monomial_index(n, 2 * d)
    E = np.array(basis, dtype=np.int64).reshape(len(basis), n)
    sums = E[:, None, :] + E[None, :, :]
    return np.array([[pos[tuple(s)] for s in row] for row in sums.tolist()], dtype=np.int64)


def symbols(n: int) -> Tuple[sympy.Symbol, ...]:
    return sympy.symbols(f"x1:{n + 1}")


def _clean(c):
    if isinstance(c, sympy.Basic):
        if c.is_Integer:
            return int(c)
        return Fraction(int(c.p), int(c.q)) if c.is_Rational else float(c)
    if isinstance(c, np.integer):
        return int(c)
    if isinstance(c, float) and c.is_integer():
        return int(c)
    return c


def _json_number(c):
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else str(c)
    return c


@dataclass
class Polynomial:
    """A real polynomial in x1..xn as a map exponent -> coefficient; zero coefficients are not stored."""
    n: int
    terms: Dict[Exponent, Number] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Exponent, Number] = {}
        for e, c in self.terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != self.n or any(v < 0 for v in e):
                raise ValueError(f"exponent {e} does not fit {self.n} variables")
            c = _clean(c)
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    # -- conversions --------------------------------------------------------

    @classmethod
    def from_sympy(cls, expr, n: int) -> "Polynomial":
        poly = sympy.Poly(sympy.expand(expr), *symbols(n))
        return cls(n, {e: c for e, c in poly.as_dict().items()})

    @classmethod
    def parse(cls, text: str, n: int) -> "Polynomial":
        """From an expression in x1..xn, e.g. "x1**4*x2**2 + x1**2*x2**4 - 3*x1**2*x2**2 + 1"."""
        local = {str(s): s for s in symbols(n)}
        return cls.from_sympy(sympy.sympify(text, locals=local), n)

    def to_sympy(self):
        xs = symbols(self.n)
        return sympy.Add(*[_sympy_number(c) * sympy.Mul(*[x ** k for x, k in zip(xs, e)]) for e, c in self.terms.items()])

    @classmethod
    def from_vector(cls, coeffs: Sequence[Number], n: int, d: int, tol: float = 0.0) -> "Polynomial":
        """From coefficients over monomials(n, d)."""
        return cls(n, {e: c for e, c in zip(_monomials(n, d), coeffs) if abs(c) > tol})

    def vector(self, d: int) -> np.ndarray:
        """Float coefficients over monomials(n, d)."""
        pos = monomial_index(self.n, d)
        out = np.zeros(len(pos))
        for e, c in self.terms.items():
            if e not in pos:
                raise ValueError(f"monomial {e} exceeds degree {d}")
            out[pos[e]] = float(c)
        return out

    @classmethod
    def from_json(cls, source) -> "Polynomial":
        """JSON list of [exponent vector, coefficient]; coefficients may be numbers or "p/q" strings."""
        if isinstance(source, str) and source.lstrip()[:1] in ("[", "{"):
            payload = json.loads(source)
        elif isinstance(source, (str, Path)):
            payload = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            payload = source
        if isinstance(payload, dict):
            payload = payload["terms"]
        if not payload:
            raise ValueError("polynomial has no terms")
        n = len(payload[0][0])
        return cls(n, {tuple(e): Fraction(c) if isinstance(c, str) else c for e, c in payload})

    def to_json(self) -> List:
        return [[list(e), _json_number(c)] for e, c in sorted(self.terms.items())]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Polynomial(self.n, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            out: Dict[Exponent, Number] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
            return Polynomial(self.n, out)
        return Polynomial(self.n, {e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.n == other.n and (self - other).is_zero()

    def evaluate(self, points) -> np.ndarray:
        """Values at the rows of points (float)."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if X.shape[1] != self.n:
            raise ValueError(f"points have {X.shape[1]} coordinates, expected {self.n}")
        out = np.zeros(X.shape[0])
        for e, c in self.terms.items():
            out += float(c) * np.prod(X ** np.array(e), axis=1)
        return out

    def substitute(self, H) -> "Polynomial":
        """p(Hx) for an n x n matrix H."""
        H = np.asarray(H)
        xs = symbols(self.n)
        lin = [sum(_sympy_number(H[i, j]) * xs[j] for j in range(self.n)) for i in range(self.n)]
        return Polynomial.from_sympy(self.to_sympy().subs(dict(zip(xs, lin)), simultaneous=True), self.n)


def _sympy_number(v):
    if isinstance(v, Fraction):
        return sympy.Rational(v.numerator, v.denominator)
    if isinstance(v, (int, np.integer)):
        return sympy.Integer(int(v))
    v = float(v)
    return sympy.Integer(int(v)) if v.is_integer() else sympy.Float(v)
