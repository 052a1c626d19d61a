"""
pi(g): the action p -> p(g^{-1} x) of an invertible matrix group on
polynomials of degree <= d, written in the graded-lex monomial basis. The
column of a monomial m holds the coefficients of m(g^{-1} x).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

from src.errors import TooLarge
from src.sos.polynomial import Exponent, Polynomial, _sympy_number, monomial_index, monomials, symbols

logger = logging.getLogger(__name__)


def substitution_matrix(H, n: int, d: int) -> np.ndarray:
    """Matrix of p -> p(Hx) on polynomials of degree <= d (exact for rational H, returned as float)."""
    H = np.asarray(H)
    if H.shape != (n, n):
        raise ValueError(f"substitution of shape {H.shape}, expected ({n}, {n})")
    xs = symbols(n)
    lin = [sympy.Add(*[_sympy_number(H[i, j]) * xs[j] for j in range(n)]) for i in range(n)]
    basis = monomials(n, d)
    pos = monomial_index(n, d)
    out = np.zeros((len(basis), len(basis)))
    for col, e in enumerate(basis):
        image = Polynomial.from_sympy(sympy.Mul(*[lin[i] ** k for i, k in enumerate(e)]), n)
        for ee, c in image.terms.items():
            out[pos[ee], col] = float(c)
    return out


@dataclass
class MonomialRep:
    n: int
    d: int
    monomials: List[Exponent]
    generators: List[np.ndarray]
    matrices: List[np.ndarray]
    elements: Optional[List[np.ndarray]] = field(default=None, repr=False)
    element_matrices: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.monomials)

    def is_orthogonal(self, tol: float = 1e-10) -> bool:
        I = np.eye(self.size)
        return all(np.abs(P @ P.T - I).max() <= tol for P in self.matrices)

    def word(self, letters: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """The group element g_{l1} g_{l2} ... and its pi image."""
        g, P = np.eye(self.n), np.eye(self.size)
        for k in letters:
            g = g @ self.generators[k]
            P = P @ self.matrices[k]
        return g, P

    @property
    def order(self) -> Optional[int]:
        return None if self.elements is None else len(self.elements)


def monomial_rep(generators: Sequence, n: int, d: int) -> MonomialRep:
    """pi(g) = substitution by g^{-1} for every generator g."""
    gens, mats = [], []
    for k, g in enumerate(generators):
        g = np.asarray(g, dtype=float)
        if g.shape != (n, n):
            raise ValueError(f"generator {k} has shape {g.shape}, expected ({n}, {n})")
        if abs(np.linalg.det(g)) < 1e-12:
            raise ValueError(f"generator {k} is singular")
        gens.append(g)
        mats.append(substitution_matrix(_nice_inverse(g), n, d))
    return MonomialRep(n=n, d=d, monomials=monomials(n, d), generators=gens, matrices=mats)


def _nice_inverse(g: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(g)
    rounded = np.round(inv)
    return rounded if np.abs(inv - rounded).max() < 1e-12 else inv


def _key(g: np.ndarray) -> bytes:
    return np.round(g, 9).tobytes()


def enumerate_group(rep: MonomialRep, max_order: int) -> MonomialRep:
    """Closure of the generators (on R^n) with the pi images; TooLarge past max_order."""
    n = rep.n
    elements, images = [np.eye(n)], [np.eye(rep.size)]
    seen = {_key(elements[0])}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g, P in zip(rep.generators, rep.matrices):
                h = g @ elements[i]
                k = _key(h)
                if k in seen:
                    continue
                seen.add(k)
                elements.append(h)
                images.append(P @ images[i])
                nxt.append(len(elements) - 1)
                if len(elements) > max_order:
                    raise TooLarge(f"group has more than {max_order} elements")
        frontier = nxt
    logger.info("enumerated a group of order %d acting on %d monomials", len(elements), rep.size)
    rep.elements, rep.element_matrices = elements, images
    return rep


def is_invariant(p: Polynomial, generators: Sequence, seed: int = 1, trials: int = 8, tol: float = 1e-8) -> Optional[int]:
    """Index of the first generator g with p(g^{-1}x) != p(x) at random points, or None."""
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((trials, p.n))
    base = p.evaluate(pts)
    scale = 1.0 + np.abs(base).max()
    for k, g in enumerate(generators):
        moved = p.evaluate(pts @ np.linalg.inv(np.asarray(g, dtype=float)).T)
        if np.abs(moved - base).max() > tol * scale:
            return k
    return None
