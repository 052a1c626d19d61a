"""The symmetra command line, end to end on small inputs."""
import io
import json
import sys
from pathlib import Path

import numpy as np
import pytest
from rich.console import Console

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import build_parser, dispatch
from src.groups import GroupAction, group_average, pair_orbits
from src.sdp import read_sdpa, restrict_to_invariant, to_sdpa, write_sdpa
from src.solver import solve_sdp


def run(*argv):
    out = io.StringIO()
    code, manifest = dispatch(list(argv), console=Console(file=out, width=140))
    return code, manifest, out.getvalue()


def write_dihedral(path, n=5):
    flip = [(-i) % n for i in range(n)]
    path.write_text(json.dumps({"n": n, "generators": [list(range(1, n)) + [0], flip]}), encoding="utf-8")
    return GroupAction.from_json(path)


def test_delsarte_prints_the_exact_bound():
    code, manifest, text = run("delsarte", "-n", "3", "-d", "3")
    assert code == 0
    assert manifest.results["bound"] == "2"
    assert manifest.audit == {"exact": True}
    assert " 2 " in text


def test_delsarte_float_mode():
    code, manifest, _ = run("delsarte", "-n", "3", "-d", "3", "--float")
    assert code == 0
    assert manifest.results["bound_float"] == pytest.approx(2.0, abs=1e-6)


def test_unknown_flag_is_a_usage_error():
    code, manifest, _ = run("delsarte", "-n", "3", "-d", "3", "--bogus")
    assert code == 2
    assert manifest.error == "usage"


def test_missing_file_is_a_usage_error(tmp_path):
    code, manifest, _ = run("orbits", "--group", str(tmp_path / "missing.json"))
    assert code == 2
    assert manifest.error == "usage"


def test_orbits_and_json_manifest(tmp_path):
    group = tmp_path / "d5.json"
    write_dihedral(group)
    out = tmp_path / "out" / "orbits.json"
    code, manifest, _ = run("orbits", "--group", str(group), "--json", str(out))
    assert code == 0
    saved = json.loads(out.read_text(encoding="utf-8"))
    assert saved["command"] == "orbits"
    assert saved["results"]["M"] == 3
    assert saved["audit"]["sizes_sum_to_n2"] is True
    assert "timings" not in saved


def test_manifest_is_reproducible(tmp_path):
    group = tmp_path / "d5.json"
    write_dihedral(group)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("blockdiag", "--group", str(group), "--json", str(a))
    run("blockdiag", "--group", str(group), "--json", str(b))
    assert a.read_text(encoding="utf-8") == b.read_text(encoding="utf-8")


def test_reduce_then_solve(tmp_path):
    group = tmp_path / "d5.json"
    action = write_dihedral(group)
    S = np.random.default_rng(3).standard_normal((5, 5))
    C = group_average(S + S.T, pair_orbits(action))
    problem = to_sdpa(restrict_to_invariant(C, [np.eye(5)], [1.0], action))
    source, target = tmp_path / "full.dat-s", tmp_path / "reduced.dat-s"
    write_sdpa(problem, source)
    code, manifest, _ = run("reduce", "--sdpa", str(source), "--group", str(group), "-o", str(target))
    assert code == 0
    assert max(manifest.results["output_blocks"]) < 5
    code, manifest, _ = run("solve", "--sdpa", str(target))
    assert code == 0
    assert manifest.results["objective"] == pytest.approx(solve_sdp(read_sdpa(source)).objective, abs=1e-6)


def test_crossing_small():
    code, manifest, _ = run("crossing", "-m", "3", "-n", "5")
    assert code == 0
    assert manifest.results["alpha"] == pytest.approx(0.5, abs=1e-7)
    assert manifest.results["zarankiewicz"] == 4


def test_crossing_large_m_needs_long():
    code, manifest, text = run("crossing", "-m", "8")
    assert code == 1
    assert manifest.error == "TooLarge"
    assert "TooLarge" in text


def test_sos_not_invariant_exits_one(tmp_path):
    group = tmp_path / "swap.json"
    group.write_text(json.dumps({"generators": [[1, 0]]}), encoding="utf-8")
    code, manifest, _ = run("sos", "--poly", "x1**2 + x2", "--group", str(group))
    assert code == 1
    assert manifest.error == "NotInvariant"


def test_sos_rational(tmp_path):
    group = tmp_path / "swap.json"
    group.write_text(json.dumps({"generators": [[[0, 1], [1, 0]]]}), encoding="utf-8")
    code, manifest, _ = run("sos", "--poly", "(x1 + x2)**2", "--group", str(group), "--rational")
    assert code == 0
    assert manifest.audit["exact"] is True


def test_sphere_avoid_right_angle():
    code, manifest, _ = run("sphere-avoid", "-n", "3", "--angle", "90", "--search", "40")
    assert code == 0
    assert manifest.results["value"] == pytest.approx(1 / 3, abs=1e-9)


@pytest.mark.parametrize(
    "line",
    [
        "sphere-lp -n 8 --theta 60 -d 11 --certify sos",
        "sphere-3pt -n 3 --theta 60 -d 10 --grid 60",
        "solve file.dat-s --tol 1e-8",
        "solve file.dat-s --emit-solution sol.json",
        "schrijver -n 10 -d 4 --backend regular",
    ],
)
def test_documented_invocations_parse(line):
    args = build_parser().parse_args(line.split())
    assert args.handler is not None


def test_sphere_lp_takes_theta():
    code, manifest, _ = run("sphere-lp", "-n", "3", "--theta", "90", "-d", "3")
    assert code == 0
    assert manifest.results["bound"] == pytest.approx(6.0, abs=1e-4)
    assert manifest.results["theta_deg"] == pytest.approx(90.0)


def test_sphere_3pt_takes_theta():
    code, manifest, _ = run("sphere-3pt", "-n", "3", "--theta", "90", "-d", "3", "--grid", "12", "--segment", "50")
    assert code == 0
    assert manifest.results["degree"] == 3
    assert manifest.results["segment_points"] == 50


def write_tiny(path):
    path.write_text("\n".join(["1", "1", "2", "1.0", "0 1 1 2 1.0", "1 1 1 1 1.0", "1 1 2 2 1.0"]), encoding="utf-8")


def test_solve_positional_file_with_tol(tmp_path):
    source = tmp_path / "tiny.dat-s"
    write_tiny(source)
    code, manifest, _ = run("solve", str(source), "--tol", "1e-8")
    assert code == 0
    assert manifest.parameters["tol"] == 1e-8
    assert manifest.results["status"] == "optimal"
    assert manifest.results["objective"] == pytest.approx(1.0, abs=1e-6)


def test_solve_emits_the_solution(tmp_path):
    source, out = tmp_path / "tiny.dat-s", tmp_path / "out" / "sol.json"
    write_tiny(source)
    code, manifest, _ = run("solve", "--sdpa", str(source), "--emit-solution", str(out))
    assert code == 0
    sol = json.loads(out.read_text(encoding="utf-8"))
    assert sol["x"][0] == pytest.approx(1.0, abs=1e-6)
    assert len(sol["Y"]) == 1 and len(sol["Y"][0]) == 2
    assert "x" not in manifest.results


def test_solve_without_a_file_is_a_usage_error():
    code, manifest, _ = run("solve", "--tol", "1e-8")
    assert code == 2
    assert manifest.error == "usage"


def test_solve_infeasible_file_is_not_a_usage_error(tmp_path):
    source = tmp_path / "none.dat-s"
    lines = ["2", "1", "2", "48 -8", "0 1 1 1 -11", "0 1 2 2 23", "1 1 1 1 10", "1 1 1 2 4", "2 1 1 2 -8", "2 1 2 2 -2"]
    source.write_text("\n".join(lines), encoding="utf-8")
    code, manifest, _ = run("solve", str(source))
    if code == 1:
        assert manifest.error == "NoInterior"
    else:
        assert code == 0
        assert manifest.results["status"] == "infeasible"
