"""Polynomials, the monomial representation and symmetric SOS certificates."""
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import Infeasible, NotInvariant
from src.sos import (
    Polynomial,
    commutant,
    monomial_rep,
    monomials,
    rationalize_certificate,
    separating_functional,
    sos_gram_sdp,
    substitution_matrix,
    verify_separating_functional,
)

SWAP = [[0, 1], [1, 0]]
FLIP = [[-1, 0], [0, 1]]
ROTATE = [[0, -1], [1, 0]]
MOTZKIN = "x1**4*x2**2 + x1**2*x2**4 - 3*x1**2*x2**2 + 1"


def test_monomials_are_graded():
    assert monomials(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(monomials(3, 3)) == 20
    with pytest.raises(ValueError):
        monomials(0, 2)


def test_parse_and_json():
    p = Polynomial.parse("x1**2 + 2*x1*x2 - x2/2", 2)
    assert p.terms == {(2, 0): 1, (1, 1): 2, (0, 1): Fraction(-1, 2)}
    assert p.degree == 2
    assert p.to_json() == [[[0, 1], "-1/2"], [[1, 1], 2], [[2, 0], 1]]
    assert Polynomial.from_json('[[[0, 1], "-1/2"], [[1, 1], 2], [[2, 0], 1]]') == p
    with pytest.raises(ValueError):
        Polynomial.from_json("[]")


def test_polynomial_arithmetic():
    x1 = Polynomial(2, {(1, 0): 1})
    x2 = Polynomial(2, {(0, 1): 1})
    square = (x1 + x2) * (x1 + x2)
    assert square == Polynomial.parse("(x1 + x2)**2", 2)
    assert (square - square).is_zero()
    assert square.evaluate([[1.0, 2.0], [0.5, -0.5]]).tolist() == [9.0, 0.0]
    assert square.substitute(FLIP) == Polynomial.parse("(x2 - x1)**2", 2)


def test_substitution_matrix_of_a_linear_map():
    S = substitution_matrix([[1, 2], [3, 4]], 2, 2)
    # columns are images of 1, x1, x2, x1^2, x1 x2, x2^2 under x -> (x1 + 2 x2, 3 x1 + 4 x2)
    expected = [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 3, 0, 0, 0],
        [0, 2, 4, 0, 0, 0],
        [0, 0, 0, 1, 3, 9],
        [0, 0, 0, 4, 10, 24],
        [0, 0, 0, 4, 8, 16],
    ]
    assert S.tolist() == expected
    assert S[:, 4].tolist() == [0.0, 0.0, 0.0, 3.0, 10.0, 8.0]
    with pytest.raises(ValueError):
        substitution_matrix(np.eye(3), 2, 2)


def test_monomial_rep_of_minus_one():
    rep = monomial_rep([[[-1.0]]], 1, 2)
    assert np.allclose(rep.matrices[0], np.diag([1.0, -1.0, 1.0]))


def test_monomial_rep_is_a_homomorphism():
    g, h = np.array(ROTATE, dtype=float), np.array(SWAP, dtype=float)
    rep = monomial_rep([g, h, g @ h], 2, 3)
    assert np.allclose(rep.matrices[2], rep.matrices[0] @ rep.matrices[1])
    assert rep.is_orthogonal()


def test_monomial_rep_rejects_singular_generators():
    with pytest.raises(ValueError):
        monomial_rep([[[1, 1], [1, 1]]], 2, 2)


def test_commutant_of_the_swap():
    rep = monomial_rep([SWAP], 2, 1)
    comm = commutant(rep)
    # 1 and x1 + x2 span the trivial part (dim 2), x1 - x2 the sign part (dim 1)
    assert comm.dim == 5
    assert comm.method == "reynolds"
    P = comm.R @ rep.matrices[0] @ np.linalg.inv(comm.R)
    for Y in comm.basis:
        assert np.allclose(P @ Y, Y @ P)


@pytest.mark.parametrize("reduce", [True, False])
def test_square_of_a_sum_is_certified_exactly(reduce):
    p = Polynomial.parse("(x1 + x2)**2", 2)
    cert = sos_gram_sdp(p, [SWAP], reduce=reduce)
    assert cert.reduced == reduce
    assert cert.error <= 1e-6
    total = Polynomial(2)
    for q in cert.squares:
        total = total + q * q
    assert np.allclose((total - p).vector(2), 0.0, atol=1e-6)
    rc = rationalize_certificate(cert)
    assert rc.expand(2) == p
    assert all(w > 0 for w in rc.weights)


def test_quartic_with_symmetry():
    p = Polynomial.parse("x1**4 + x2**4 + 1", 2)
    cert = sos_gram_sdp(p, [SWAP, FLIP])
    assert cert.margin > 0
    assert sum(m * s for m, s in zip(cert.multiplicities, cert.block_sizes)) == len(monomials(2, 2))
    assert max(cert.block_sizes) < len(monomials(2, 2))
    assert cert.to_dict()["feasible"]


def test_motzkin_is_not_a_sum_of_squares():
    p = Polynomial.parse(MOTZKIN, 2)
    with pytest.raises(Infeasible) as info:
        sos_gram_sdp(p, [SWAP, FLIP])
    certificate = info.value.certificate
    assert certificate["value"] < 0
    assert certificate["verified"]


def test_separating_functional_for_motzkin():
    p = Polynomial.parse(MOTZKIN, 2)
    ell, value = separating_functional(p, 3)
    assert value < 0
    assert verify_separating_functional(ell, p, 3, tol=1e-7)
    with pytest.raises(ValueError):
        verify_separating_functional(ell[:-1], p, 3)


def test_not_invariant():
    p = Polynomial.parse("x1**2 + x2", 2)
    with pytest.raises(NotInvariant) as info:
        sos_gram_sdp(p, [SWAP])
    assert info.value.generator == 0


@pytest.mark.parametrize("text, d", [("x1**3 + 1", None), ("x1**4 + 1", 1)])
def test_degree_checks(text, d):
    with pytest.raises(ValueError):
        sos_gram_sdp(Polynomial.parse(text, 1), d=d)
