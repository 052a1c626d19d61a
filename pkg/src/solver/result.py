from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
MAXITER = "maxiter"


@dataclass
class SolveResult:
    """
    Outcome of an LP or SDP solve.

    objective is the value of the program as posed by the caller (sign and
    offset of a reduced program already applied); primal_objective and
    dual_objective are the raw values of the solved form.
    """
    status: str
    objective: float = float("nan")
    primal_objective: float = float("nan")
    dual_objective: float = float("nan")
    gap: float = float("nan")
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    X: Optional[List[np.ndarray]] = field(default=None, repr=False)
    Y: Optional[List[np.ndarray]] = field(default=None, repr=False)
    iterations: int = 0
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL

    def to_dict(self, with_solution: bool = False) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "status": self.status,
            "objective": _num(self.objective),
            "primal_objective": _num(self.primal_objective),
            "dual_objective": _num(self.dual_objective),
            "gap": _num(self.gap),
            "iterations": self.iterations,
        }
        out.update({k: v for k, v in self.info.items() if isinstance(v, (int, float, str, bool))})
        if with_solution:
            out["x"] = [] if self.x is None else [_num(v) for v in np.asarray(self.x, dtype=float)]
            if self.y is not None:
                out["y"] = [_num(v) for v in np.asarray(self.y, dtype=float).ravel()]
            if self.Y is not None:
                out["Y"] = [np.asarray(B, dtype=float).tolist() for B in self.Y]
        return out


def _num(v) -> Optional[float]:
    v = float(v)
    return None if np.isnan(v) else v
