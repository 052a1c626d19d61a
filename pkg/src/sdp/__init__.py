from .problem import BlockData, InvariantSDP, LinearSDPBuilder, SDPAProblem, embed_hermitian
from .reduction import (
    dense_sdp,
    orbit_solution,
    reconstruct,
    reduce_block,
    reduce_regular,
    reduce_sdpa,
    restrict_to_invariant,
    to_sdpa,
)
from .sdpa_io import format_sdpa, parse_sdpa, read_sdpa, write_sdpa

__all__ = [
    "BlockData",
    "InvariantSDP",
    "LinearSDPBuilder",
    "SDPAProblem",
    "dense_sdp",
    "embed_hermitian",
    "format_sdpa",
    "orbit_solution",
    "parse_sdpa",
    "read_sdpa",
    "reconstruct",
    "reduce_block",
    "reduce_regular",
    "reduce_sdpa",
    "restrict_to_invariant",
    "to_sdpa",
    "write_sdpa",
]
