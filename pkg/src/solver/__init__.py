from .lp import LPProblem, solve_lp
from .result import INFEASIBLE, MAXITER, OPTIMAL, UNBOUNDED, SolveResult
from .sdp import solve_sdp

__all__ = [
    "INFEASIBLE",
    "LPProblem",
    "MAXITER",
    "OPTIMAL",
    "SolveResult",
    "UNBOUNDED",
    "solve_lp",
    "solve_sdp",
]
