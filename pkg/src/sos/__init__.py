from .gram import (
    Commutant,
    RationalCertificate,
    SOSCertificate,
    commutant,
    gram_coefficients,
    rationalize_certificate,
    separating_functional,
    sos_gram_sdp,
    verify_separating_functional,
)
from .monomial_rep import MonomialRep, enumerate_group, is_invariant, monomial_rep, substitution_matrix
from .polynomial import Polynomial, monomial_index, monomials

__all__ = [
    "Commutant",
    "MonomialRep",
    "Polynomial",
    "RationalCertificate",
    "SOSCertificate",
    "commutant",
    "enumerate_group",
    "gram_coefficients",
    "is_invariant",
    "monomial_index",
    "monomial_rep",
    "monomials",
    "rationalize_certificate",
    "separating_functional",
    "sos_gram_sdp",
    "substitution_matrix",
    "verify_separating_functional",
]
