"""Bound sweeps over a small range of n."""
import io
import json
import sys
from pathlib import Path

import pytest
from rich.console import Console

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.codes import delsarte_lp
from src.config import AppConfig
from src.pipeline import print_sweep, run_bound_sweep
from src.utils.tracker import RunTracker


def small_config(tmp_path):
    cfg = AppConfig()
    cfg.sweep.n_min, cfg.sweep.n_max, cfg.sweep.d = 5, 6, 3
    cfg.sweep.log_path = str(tmp_path / "logs" / "sweep.jsonl")
    cfg.sweep.csv_path = str(tmp_path / "results" / "bounds.csv")
    return cfg


def test_sweep_writes_table_and_log(tmp_path):
    cfg = small_config(tmp_path)
    tracker = RunTracker()
    df = run_bound_sweep(cfg, tracker=tracker, progress=False)
    assert df["n"].tolist() == [5, 6]
    for row in df.itertuples(index=False):
        assert row.delsarte == pytest.approx(float(delsarte_lp(row.n, 3).bound))
        assert row.gap >= -1e-5
    lines = Path(cfg.sweep.log_path).read_text(encoding="utf-8").splitlines()
    assert [json.loads(line)["n"] for line in lines] == [5, 6]
    assert Path(cfg.sweep.csv_path).exists()
    assert tracker.get_stats()["by_stage"]["delsarte"]["calls"] == 2

    out = io.StringIO()
    print_sweep(df, Console(file=out, width=120))
    assert "Upper bounds on A(n, d)" in out.getvalue()


def test_sweep_replaces_an_old_log(tmp_path):
    cfg = small_config(tmp_path)
    cfg.sweep.n_min = cfg.sweep.n_max = 5
    run_bound_sweep(cfg, progress=False)
    run_bound_sweep(cfg, progress=False)
    assert len(Path(cfg.sweep.log_path).read_text(encoding="utf-8").splitlines()) == 1


def test_sweep_skips_d_above_n(tmp_path):
    cfg = small_config(tmp_path)
    cfg.sweep.n_min, cfg.sweep.n_max, cfg.sweep.d = 1, 2, 3
    df = run_bound_sweep(cfg, progress=False)
    assert df.empty
