from .basis import AlgebraBasis
from .blockdiag import BlockDiagonalization, block_diagonalize
from .psd import psd_decompose
from .regular import RegularRep, regular_rep
from .verify import VerificationReport, verify_star_isomorphism

__all__ = [
    "AlgebraBasis",
    "BlockDiagonalization",
    "RegularRep",
    "VerificationReport",
    "block_diagonalize",
    "psd_decompose",
    "regular_rep",
    "verify_star_isomorphism",
]
