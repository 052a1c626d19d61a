from .hamming import (
    DelsarteBound,
    HammingSpace,
    delsarte_lp,
    distance_basis,
    even_weight_code,
    hamming_action,
    min_distance,
    repetition_code,
)
from .krawtchouk import KrawtchoukTable, krawtchouk
from .terwilliger import (
    TripleBound,
    TripleOrbitIndex,
    schrijver_triple_sdp,
    terwilliger_block_sizes,
    terwilliger_orbits,
    terwilliger_structure_constants,
    triple_orbit_index,
)

__all__ = [
    "DelsarteBound",
    "HammingSpace",
    "KrawtchoukTable",
    "TripleBound",
    "TripleOrbitIndex",
    "delsarte_lp",
    "distance_basis",
    "even_weight_code",
    "hamming_action",
    "krawtchouk",
    "min_distance",
    "repetition_code",
    "schrijver_triple_sdp",
    "terwilliger_block_sizes",
    "terwilliger_orbits",
    "terwilliger_structure_constants",
    "triple_orbit_index",
]
