from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from src import __version__

FLOAT_DIGITS = 10


def fixed_precision(value: Any) -> Any:
    """Numbers rounded to FLOAT_DIGITS significant digits, recursively; arrays become lists."""
    if isinstance(value, dict):
        return {str(k): fixed_precision(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [fixed_precision(v) for v in value]
    if isinstance(value, np.ndarray):
        return fixed_precision(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not np.isfinite(v):
            return str(v)
        return float(f"{v:.{FLOAT_DIGITS}g}")
    return value


@dataclass
class RunManifest:
    """One CLI or sweep run: what was asked, with which seed, what came out."""
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = 1
    version: str = __version__
    timings: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    audit: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0
    error: Optional[str] = None

    def to_dict(self, with_timings: bool = True) -> Dict[str, Any]:
        out = {
            "command": self.command,
            "parameters": fixed_precision(self.parameters),
            "seed": self.seed,
            "version": self.version,
            "results": fixed_precision(self.results),
            "audit": fixed_precision(self.audit),
            "exit_code": self.exit_code,
            "error": self.error,
        }
        if with_timings:
            out["timings"] = fixed_precision(self.timings)
        return out

    def to_json(self, with_timings: bool = True) -> str:
        return json.dumps(self.to_dict(with_timings), indent=2, sort_keys=True)

    def save(self, path: Path | str, with_timings: bool = True) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(with_timings) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> "RunManifest":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            command=raw["command"],
            parameters=raw.get("parameters", {}),
            seed=raw.get("seed", 1),
            version=raw.get("version", __version__),
            timings=raw.get("timings", {}),
            results=raw.get("results", {}),
            audit=raw.get("audit", {}),
            exit_code=raw.get("exit_code", 0),
            error=raw.get("error"),
        )
