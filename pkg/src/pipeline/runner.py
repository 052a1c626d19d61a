from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, Optional

import pandas as pd
from rich.console import Console
from rich.table import Table
from tqdm import tqdm

from src.codes.hamming import delsarte_lp
from src.codes.terwilliger import schrijver_triple_sdp
from src.config import AppConfig
from src.errors import SymmetraError
from src.state.manifest import fixed_precision
from src.utils.tracker import RunTracker

logger = logging.getLogger(__name__)

COLUMNS = ["n", "d", "delsarte", "triple", "gap", "backend", "status", "seconds"]


def _instances(config: AppConfig) -> Iterable[tuple]:
    s = config.sweep
    for n in range(s.n_min, s.n_max + 1):
        if s.d <= n:
            yield n, s.d


def run_bound_sweep(config: AppConfig, tracker: Optional[RunTracker] = None, progress: bool = True) -> pd.DataFrame:
    """
    Delsarte and triple bounds on A(n, d) for n in [sweep.n_min, sweep.n_max]
    at d = sweep.d. One JSON line per instance goes to sweep.log_path and the
    table to sweep.csv_path.
    """
    tracker = tracker or RunTracker()
    s = config.sweep
    log_path = Path(s.log_path) if s.log_path else None
    if log_path:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        if log_path.exists():
            log_path.unlink()

    rows = []
    instances = list(_instances(config))
    for n, d in tqdm(instances, desc="bounds", disable=not progress):
        with tracker.stage("delsarte", n=n, d=d):
            lp = delsarte_lp(n, d, q=2, mode="rational", config=config.solver)
        delsarte = float(lp.bound)
        status = "ok"
        with tracker.stage("triple", n=n, d=d):
            try:
                triple = schrijver_triple_sdp(n, d, backend=s.backend, config=config)
                triple_bound, status = triple.bound, triple.status
            except SymmetraError as exc:
                logger.warning("triple bound for n=%d, d=%d failed: %s", n, d, exc.name)
                triple_bound, status = float("nan"), exc.name
        row = {
            "n": n,
            "d": d,
            "delsarte": delsarte,
            "triple": float(triple_bound),
            "gap": delsarte - float(triple_bound),
            "backend": s.backend,
            "status": status,
            "seconds": round(tracker.records[-1].seconds, 3),
        }
        rows.append(row)
        logger.debug("n=%d d=%d: delsarte %.4f triple %.4f", n, d, delsarte, triple_bound)
        if log_path:
            with log_path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(fixed_precision(row)) + "\n")

    df = pd.DataFrame(rows, columns=COLUMNS)
    if s.csv_path:
        out = Path(s.csv_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(out, index=False, float_format="%.6f")
        logger.info("wrote %d rows to %s", len(df), out)
    return df


def print_sweep(df: pd.DataFrame, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title="Upper bounds on A(n, d)", show_lines=False)
    for col in ("n", "d", "delsarte", "triple", "gap", "status"):
        table.add_column(col, justify="right" if col not in ("status",) else "left")
    for row in df.itertuples(index=False):
        table.add_row(
            str(row.n),
            str(row.d),
            f"{row.delsarte:.4f}",
            f"{row.triple:.4f}",
            f"{row.gap:.4f}",
            str(row.status),
        )
    console.print(table)
