from __future__ import annotations

import json
import os
from pathlib import Path
from typing import List

import yaml
from pydantic import BaseModel, Field


class AlgebraConfig(BaseModel):
    cluster_gap: float = 1e-7  # relative to ||A||
    offdiag_threshold: float = 1e-8
    max_retries: int = 8
    verify_tol: float = 1e-7
    audit_representatives: bool = False


class SolverConfig(BaseModel):
    tol: float = 1e-8
    feas_tol: float = 1e-7
    maxiter: int = 120
    step_fraction: float = 0.98
    lp_tol: float = 1e-9


class SphereConfig(BaseModel):
    grid_points: int = 2000
    audit_factor: int = 10
    theta2_search: int = 200
    box_grid: int = 60
    segment_grid: int = 400
    audit_refine: int = 4
    audit_slack: float = 1e-3
    domain: str = "box"  # box | realizable


class CrossingConfig(BaseModel):
    long_m: List[int] = Field(default_factory=lambda: [8, 9])


class SOSConfig(BaseModel):
    max_group_order: int = 10_000
    invariance_tol: float = 1e-8
    certificate_tol: float = 1e-7
    infeasible_margin: float = 1e-6


class SweepConfig(BaseModel):
    n_min: int = 4
    n_max: int = 10
    d: int = 4
    backend: str = "regular"  # regular | blockdiag
    log_path: str | None = "logs/sweep_log.jsonl"
    csv_path: str | None = "results/bounds.csv"


class AppConfig(BaseModel):
    seed: int = 1
    threads: int = 1
    algebra: AlgebraConfig = Field(default_factory=AlgebraConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    sphere: SphereConfig = Field(default_factory=SphereConfig)
    crossing: CrossingConfig = Field(default_factory=CrossingConfig)
    sos: SOSConfig = Field(default_factory=SOSConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @classmethod
    def from_yaml(cls, path: Path) -> "AppConfig":
        with path.open("r", encoding="utf-8") as f:
            payload = yaml.safe_load(f) or {}
        return cls.model_validate(payload)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2)


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load YAML config (defaults when path is None); SYMMETRA_SEED wins over the file."""
    config = AppConfig() if path is None else AppConfig.from_yaml(Path(path))
    env_seed = os.getenv("SYMMETRA_SEED")
    if env_seed:
        config.seed = int(env_seed)
    return config
