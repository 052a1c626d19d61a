from .orbits import PairOrbitStructure, StructureConstants, group_average, pair_orbits, structure_constants
from .permutation import GroupAction, Permutation

__all__ = [
    "GroupAction",
    "PairOrbitStructure",
    "Permutation",
    "StructureConstants",
    "group_average",
    "pair_orbits",
    "structure_constants",
]
