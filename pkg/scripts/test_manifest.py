"""Run manifests, configuration and the stage tracker."""
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import AppConfig, load_config
from src.state.manifest import RunManifest, fixed_precision
from src.utils.tracker import RunTracker


def test_fixed_precision_values():
    assert fixed_precision(1 / 3) == 0.3333333333
    assert fixed_precision(Fraction(7, 2)) == "7/2"
    assert fixed_precision(np.int64(4)) == 4
    assert fixed_precision(np.bool_(True)) is True
    assert fixed_precision(math.inf) == "inf"
    assert fixed_precision({"a": np.array([0.1, 2.0])}) == {"a": [0.1, 2.0]}
    assert fixed_precision((1, "x")) == [1, "x"]


def test_manifest_save_and_load(tmp_path):
    m = RunManifest(
        command="delsarte",
        parameters={"n": 3, "d": 3},
        seed=5,
        timings={"delsarte": {"calls": 1, "seconds": 0.25}},
        results={"bound": Fraction(2)},
        audit={"exact": True},
    )
    path = tmp_path / "runs" / "delsarte.json"
    m.save(path)
    again = RunManifest.load(path)
    assert again.command == "delsarte"
    assert again.seed == 5
    assert again.results == {"bound": "2"}
    assert again.timings["delsarte"]["calls"] == 1


def test_manifest_without_timings_is_stable():
    a = RunManifest(command="x", timings={"solve": {"calls": 1, "seconds": 0.1}})
    b = RunManifest(command="x", timings={"solve": {"calls": 1, "seconds": 9.9}})
    assert a.to_json(with_timings=False) == b.to_json(with_timings=False)
    assert "timings" in a.to_dict()


def test_default_config_file_matches_the_defaults():
    cfg = load_config(Path(__file__).parent.parent / "configs" / "default.yaml")
    assert cfg.model_dump() == AppConfig().model_dump()


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("SYMMETRA_SEED", "17")
    assert load_config().seed == 17


def test_config_rejects_bad_types(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("solver:\n  maxiter: many\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(path)


def test_tracker_counts_stages():
    tracker = RunTracker()
    with tracker.stage("solve"):
        pass
    with tracker.stage("solve"):
        pass
    tracker.record("build", 0.5)
    stats = tracker.get_stats()
    assert stats["by_stage"]["solve"]["calls"] == 2
    assert stats["by_stage"]["build"]["seconds"] == pytest.approx(0.5)
