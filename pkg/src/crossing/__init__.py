from .alpha import (
    AlphaResult,
    CrossingOrbits,
    alpha_m,
    alpha_program,
    crossing_bound,
    crossing_structure_constants,
    orbit_structure,
    zarankiewicz,
)
from .cyclic import (
    CyclicSpace,
    diagonal_crossings,
    enumerate_cyclic,
    star_crossing,
    star_crossing_bruteforce,
    swap_distances,
)

__all__ = [
    "AlphaResult",
    "CrossingOrbits",
    "CyclicSpace",
    "alpha_m",
    "alpha_program",
    "crossing_bound",
    "crossing_structure_constants",
    "diagonal_crossings",
    "enumerate_cyclic",
    "orbit_structure",
    "star_crossing",
    "star_crossing_bruteforce",
    "swap_distances",
    "zarankiewicz",
]
