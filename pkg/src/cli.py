"""
symmetra command line.

Every subcommand fills a RunManifest (parameters, results, audit flags) and
prints a rich table; `--json path` writes the manifest. Usage errors exit 2,
computational failures exit 1 with the error name.
"""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from src import __version__
from src.config import AppConfig, load_config
from src.errors import Infeasible, NoNegativeValue, SymmetraError
from src.state.manifest import RunManifest
from src.utils.logs import setup_logging
from src.utils.tracker import RunTracker

logger = logging.getLogger(__name__)

Outcome = Tuple[Dict, Dict]


# -- shared helpers ---------------------------------------------------------


def _read_json(path: Path) -> Dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _radians(degrees: float) -> float:
    return float(np.radians(degrees))


def _table(title: str, columns: Sequence[str], rows: Sequence[Sequence], console: Console) -> None:
    table = Table(title=title)
    for col in columns:
        table.add_column(col, justify="right")
    for row in rows:
        table.add_row(*[_cell(v) for v in row])
    console.print(table)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    return str(v)


def _matrix_group(path: Path, n: int) -> List[np.ndarray]:
    """
    Generators of a linear group on R^n from JSON {"generators": [...]}. A
    generator is an n x n matrix (entries numbers or "p/q" strings) or a flat
    list of images, read as the permutation of variables x_i -> x_{g(i)}.
    """
    payload = _read_json(path)
    out = []
    for k, g in enumerate(payload.get("generators", [])):
        if g and not isinstance(g[0], list):
            if sorted(g) != list(range(n)):
                raise ValueError(f"generator {k} is not a permutation of 0..{n - 1}")
            P = np.zeros((n, n))
            P[np.asarray(g), np.arange(n)] = 1.0
            out.append(P)
        else:
            out.append(np.array([[float(Fraction(v)) if isinstance(v, str) else float(v) for v in row] for row in g]))
    return out


def _variables_in(text: str) -> int:
    found = [int(k) for k in re.findall(r"x(\d+)", text)]
    if not found:
        raise ValueError(f"no variables x1, x2, ... in {text!r}")
    return max(found)


# -- subcommands ------------------------------------------------------------


def cmd_orbits(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.groups import GroupAction, pair_orbits

    action = GroupAction.from_json(args.group)
    with tracker.stage("orbits"):
        orbits = pair_orbits(action)
    rows = [
        (r, int(orbits.orbit_sizes[r]), orbits.representatives[r], int(orbits.transpose_map[r]))
        for r in range(orbits.M)
    ]
    _table(f"Pair orbits of a group on {action.n} points (M = {orbits.M})", ["orbit", "size", "representative", "transpose"], rows, console)
    results = {
        "M": orbits.M,
        "orbit_sizes": orbits.orbit_sizes.tolist(),
        "representatives": [list(p) for p in orbits.representatives],
        "transpose": orbits.transpose_map.tolist(),
    }
    return results, {"sizes_sum_to_n2": int(orbits.orbit_sizes.sum()) == action.n ** 2}


def cmd_blockdiag(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.algebra import AlgebraBasis, block_diagonalize, verify_star_isomorphism
    from src.groups import GroupAction, pair_orbits

    if args.basis:
        basis = AlgebraBasis.from_json(args.basis)
    else:
        basis = AlgebraBasis.from_orbits(pair_orbits(GroupAction.from_json(args.group)))
    with tracker.stage("blockdiag"):
        bd = block_diagonalize(basis, seed=cfg.seed, tol=args.tol, config=cfg.algebra)
    with tracker.stage("verify"):
        report = verify_star_isomorphism(
            bd.images,
            basis=basis,
            multiplicities=bd.multiplicities,
            kernel_dim=bd.kernel_dim,
            tol=cfg.algebra.verify_tol,
            seed=cfg.seed,
        )
    rows = [(k, m, s, bd.block_is_real(k)) for k, (m, s) in enumerate(zip(bd.block_sizes, bd.multiplicities))]
    _table(f"Blocks of a {basis.M}-dimensional algebra on C^{basis.n}", ["block", "size", "multiplicity", "real"], rows, console)
    console.print(f"verification: max error {report.max_error:.3e}, passed {report.passed}")
    if args.images:
        images = [
            [{"re": np.real(blk).tolist(), "im": np.imag(blk).tolist()} for blk in blocks]
            for blocks in bd.images
        ]
        Path(args.images).write_text(json.dumps({"block_sizes": bd.block_sizes, "images": images}), encoding="utf-8")
        logger.info("wrote block images to %s", args.images)
    return bd.summary(), report.to_dict()


def cmd_reduce(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.groups import GroupAction
    from src.sdp import read_sdpa, reduce_sdpa, write_sdpa

    problem = read_sdpa(args.sdpa)
    action = GroupAction.from_json(args.group)
    step = {"1.5": "regular", "2": "block"}[args.step]
    with tracker.stage("reduce", step=args.step):
        reduced = reduce_sdpa(problem, action, step=step, seed=cfg.seed)
    write_sdpa(reduced, args.output)
    _table(
        f"Step {args.step} reduction",
        ["", "variables", "blocks"],
        [("input", problem.m, problem.block_struct), ("output", reduced.m, reduced.block_struct)],
        console,
    )
    return {"input_blocks": problem.block_struct, "output_blocks": reduced.block_struct, "output": str(args.output)}, {}


def cmd_solve(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.sdp import read_sdpa
    from src.solver import solve_sdp

    source = args.sdpa or args.sdpa_file
    if source is None:
        raise ValueError("solve needs an SDPA file")
    problem = read_sdpa(source)
    with tracker.stage("solve"):
        result = solve_sdp(problem, tol=args.tol, config=cfg.solver, strict=args.strict)
    _table("SDP", ["status", "objective", "gap", "iterations"], [(result.status, result.objective, result.gap, result.iterations)], console)
    if args.emit_solution:
        out = Path(args.emit_solution)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(result.to_dict(with_solution=True), indent=2), encoding="utf-8")
        logger.info("wrote the solution to %s", out)
    return result.to_dict(with_solution=args.solution), {"optimal": result.ok}


def cmd_delsarte(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.codes import delsarte_lp

    with tracker.stage("delsarte"):
        lp = delsarte_lp(args.n, args.d, q=args.q, mode="rational" if args.rational else "float", config=cfg.solver)
    _table(f"Delsarte bound on A_{args.q}({args.n}, {args.d})", ["bound", "status"], [(lp.bound, lp.status)], console)
    return lp.to_dict(), {"exact": args.rational}


def cmd_schrijver(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.codes import schrijver_triple_sdp

    with tracker.stage("triple"):
        tb = schrijver_triple_sdp(args.n, args.d, backend=args.backend, config=cfg)
    _table(f"Triple bound on A({args.n}, {args.d})", ["bound", "status", "variables", "blocks"],
           [(tb.bound, tb.status, tb.variables, tb.block_struct)], console)
    return tb.to_dict(), {}


def cmd_sphere_lp(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.sphere import delsarte_lp_sphere

    with tracker.stage("sphere_lp"):
        sb = delsarte_lp_sphere(args.n, _radians(args.angle), args.d, certify=args.certify, config=cfg)
    _table(f"Spherical code bound, S^{args.n - 1}, angle {args.angle} deg", ["degree", "bound", "certified", "repaired"],
           [(sb.degree, sb.bound, sb.certified, sb.repaired)], console)
    return sb.to_dict(), {"certified": sb.certified, "max_violation": sb.max_violation}


def cmd_sphere_avoid(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.sphere import theta2_avoid_angle

    try:
        av = theta2_avoid_angle(args.n, _radians(args.angle), K_search=args.search or cfg.sphere.theta2_search)
    except NoNegativeValue as exc:
        console.print(f"no negative value found; min P_k = {exc.minimum:.6g}")
        raise
    _table(f"Angle avoidance, S^{args.n - 1}, angle {args.angle} deg", ["value", "min P_k", "k", "settled"],
           [(av.value, av.minimum, av.argmin, av.settled)], console)
    return av.to_dict(), {"settled": av.settled}


def cmd_sphere_3pt(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.sphere import three_point_sdp

    with tracker.stage("three_point"):
        tp = three_point_sdp(
            args.n,
            _radians(args.angle),
            args.d,
            grid_density=args.grid,
            segment_density=args.segment,
            domain=args.domain,
            config=cfg,
        )
    _table(f"Three-point bound, S^{args.n - 1}, angle {args.angle} deg", ["degree", "bound", "audit", "box", "segment"],
           [(tp.degree, tp.bound, tp.audit_passed, tp.box_violation, tp.segment_violation)], console)
    audit = {"grid_relaxed": tp.grid_relaxed, "audit_passed": tp.audit_passed}
    return tp.to_dict(), audit


def cmd_crossing(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.crossing import alpha_m, crossing_bound, zarankiewicz

    res = alpha_m(args.m, backend=args.backend, long=args.long, config=cfg)
    for name, stats in res.timings.items():
        tracker.record(name, stats["seconds"])
    results = res.to_dict()
    rows = [("alpha", res.alpha), ("orbits", res.orbits), ("block size", res.block_size)]
    if args.n:
        bound = crossing_bound(args.m, args.n, res.alpha)
        results.update({"n": args.n, "crossing_bound": bound, "zarankiewicz": zarankiewicz(args.m, args.n)})
        rows += [(f"cr(K_{args.m},{args.n}) >=", bound), ("Z(m, n)", zarankiewicz(args.m, args.n))]
    _table(f"Crossing numbers, m = {args.m}", ["quantity", "value"], rows, console)
    return results, {}


def cmd_sos(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.sos import Polynomial, rationalize_certificate, sos_gram_sdp

    if Path(args.poly).is_file():
        p = Polynomial.from_json(Path(args.poly))
    else:
        p = Polynomial.parse(args.poly, args.nvars or _variables_in(args.poly))
    generators = _matrix_group(args.group, p.n) if args.group else []
    with tracker.stage("sos"):
        cert = sos_gram_sdp(p, generators, d=args.d, seed=cfg.seed, reduce=not args.no_reduce, config=cfg)
    results = cert.to_dict()
    audit = {"coefficient_error": cert.error}
    rows = [(str(q.to_sympy()),) for q in cert.squares]
    if args.rational:
        with tracker.stage("rationalize"):
            rc = rationalize_certificate(cert, max_denominator=args.max_denominator)
        results["rational"] = {
            "weights": [str(w) for w in rc.weights],
            "squares": [q.to_json() for q in rc.squares],
        }
        audit["exact"] = rc.expand(p.n) == p
        rows = [(f"{w} * ({q.to_sympy()})^2",) for w, q in zip(rc.weights, rc.squares)]
    _table(f"p = sum of {len(rows)} squares (blocks {cert.block_sizes})", ["term"], rows, console)
    return results, audit


def cmd_table(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.pipeline import print_sweep, run_bound_sweep

    s = cfg.sweep
    s.n_min = args.n_min if args.n_min is not None else s.n_min
    s.n_max = args.n_max if args.n_max is not None else s.n_max
    s.d = args.d if args.d is not None else s.d
    s.backend = args.backend or s.backend
    s.csv_path = str(args.csv) if args.csv else s.csv_path
    df = run_bound_sweep(cfg, tracker=tracker, progress=False)
    print_sweep(df, console)
    return {"rows": df.to_dict(orient="records")}, {"triple_le_delsarte": bool((df["gap"].dropna() >= -1e-6).all())}


def cmd_theta(args, cfg: AppConfig, tracker: RunTracker, console: Console) -> Outcome:
    from src.groups import GroupAction
    from src.sdp.theta import solve_theta

    graph = _read_json(args.graph)
    n = int(graph["n"])
    edges = [tuple(e) for e in graph["edges"]]
    action = GroupAction.from_json(args.group) if args.group else None
    with tracker.stage("theta", backend=args.backend):
        result = solve_theta(edges, n, action, nonnegative=not args.plain, backend=args.backend, config=cfg)
    name = "theta" if args.plain else "theta'"
    _table(f"{name} of a graph on {n} vertices", ["value", "status", "blocks"],
           [(result.objective, result.status, result.info.get("blocks", ""))], console)
    return result.to_dict(), {"optimal": result.ok}


# -- parser -----------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", type=Path, default=None, help="write the run manifest here")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: SYMMETRA_SEED or 1)")
    common.add_argument("--threads", type=int, default=None, help="worker cap")
    common.add_argument("--log-level", default="WARNING")
    common.add_argument("--config", type=Path, default=None, help="YAML configuration")
    common.add_argument("--timings", action="store_true", help="include stage timings in the manifest")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="symmetra", description="Symmetry reduction of semidefinite programs.")
    parser.add_argument("--version", action="version", version=f"symmetra {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, summary: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=summary)
        p.set_defaults(handler=handler)
        return p

    p = add("orbits", cmd_orbits, "orbits of a permutation group on pairs")
    p.add_argument("--group", type=Path, required=True)

    p = add("blockdiag", cmd_blockdiag, "block-diagonalize a matrix *-algebra")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--basis", type=Path)
    source.add_argument("--group", type=Path)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--images", type=Path, default=None, help="write the block images as JSON")

    p = add("reduce", cmd_reduce, "reduce an SDPA problem with a group")
    p.add_argument("--sdpa", type=Path, required=True)
    p.add_argument("--group", type=Path, required=True)
    p.add_argument("--step", choices=["1.5", "2"], default="2")
    p.add_argument("-o", "--output", type=Path, required=True)

    p = add("solve", cmd_solve, "solve an SDPA problem")
    p.add_argument("sdpa", type=Path, nargs="?", default=None, help="SDPA file")
    p.add_argument("--sdpa", dest="sdpa_file", type=Path, default=None, help="SDPA file (alternative to the positional form)")
    p.add_argument("--tol", type=float, default=None, help="relative duality gap (default: solver.tol)")
    p.add_argument("--emit-solution", type=Path, default=None, help="write x, y and Y as JSON")
    p.add_argument("--solution", action="store_true", help="put x, y, Y in the manifest")
    p.add_argument("--strict", action="store_true", help="fail with MaxIter when the iteration cap is hit")

    p = add("delsarte", cmd_delsarte, "Delsarte LP bound on A_q(n, d)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-q", type=int, default=2)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--rational", dest="rational", action="store_true", default=True)
    mode.add_argument("--float", dest="rational", action="store_false")

    p = add("schrijver", cmd_schrijver, "triple bound on A(n, d)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--backend", choices=["regular", "blockdiag"], default="regular")

    p = add("sphere-lp", cmd_sphere_lp, "Delsarte bound for spherical codes")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--theta", "--angle", dest="angle", type=float, required=True, help="minimal angle in degrees")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--certify", choices=["grid", "sos"], default="grid")

    p = add("sphere-avoid", cmd_sphere_avoid, "measurable sets avoiding one angle")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--theta", "--angle", dest="angle", type=float, required=True, help="angle in degrees")
    p.add_argument("--search", type=int, default=None, help="largest degree searched")

    p = add("sphere-3pt", cmd_sphere_3pt, "three-point bound for spherical codes")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--theta", "--angle", dest="angle", type=float, required=True, help="minimal angle in degrees")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--segment", type=int, default=None)
    p.add_argument("--domain", choices=["box", "realizable"], default=None)

    p = add("crossing", cmd_crossing, "alpha_m and crossing number bounds for K_{m,n}")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("--backend", choices=["regular", "dense"], default="regular")
    p.add_argument("--long", action="store_true", help="allow m = 8, 9")

    p = add("sos", cmd_sos, "symmetric sum-of-squares decomposition")
    p.add_argument("--poly", required=True, help="expression in x1..xn or a JSON term list")
    p.add_argument("--nvars", type=int, default=None)
    p.add_argument("--group", type=Path, default=None)
    p.add_argument("-d", type=int, default=None, help="degree of the squares")
    p.add_argument("--no-reduce", action="store_true")
    p.add_argument("--rational", action="store_true", help="round to an exact rational certificate")
    p.add_argument("--max-denominator", type=int, default=1000)

    p = add("table", cmd_table, "Delsarte vs triple bounds over a range of n")
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("-d", type=int, default=None)
    p.add_argument("--backend", choices=["regular", "blockdiag"], default=None)
    p.add_argument("--csv", type=Path, default=None)

    p = add("theta", cmd_theta, "theta' (or theta) of a graph")
    p.add_argument("--graph", type=Path, required=True, help='JSON {"n": ..., "edges": [[u, v], ...]}')
    p.add_argument("--group", type=Path, default=None)
    p.add_argument("--plain", action="store_true", help="Lovasz theta without nonnegativity")
    p.add_argument("--backend", choices=["dense", "orbit", "regular", "block"], default="regular")
    return parser


def _parameters(args: argparse.Namespace) -> Dict:
    skip = {"handler", "json", "log_level", "config", "timings", "command"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


def dispatch(argv: Optional[Sequence[str]] = None, console: Optional[Console] = None) -> Tuple[int, RunManifest]:
    """Run one subcommand; returns the exit code and the manifest of the run."""
    console = console or Console()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return code, RunManifest(command="", exit_code=code, error=None if code == 0 else "usage")

    setup_logging(args.log_level)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        console.print(f"[red]error:[/red] cannot load configuration: {exc}")
        return 2, RunManifest(command=args.command, exit_code=2, error="usage")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = max(1, args.threads)

    manifest = RunManifest(command=args.command, parameters=_parameters(args), seed=cfg.seed)
    tracker = RunTracker()
    try:
        results, audit = args.handler(args, cfg, tracker, console)
        manifest.results, manifest.audit = results, audit
    except SymmetraError as exc:
        console.print(f"[red]{exc.name}[/red]: {exc}")
        manifest.exit_code, manifest.error = 1, exc.name
        if isinstance(exc, Infeasible) and exc.certificate:
            manifest.audit = {"certificate": exc.certificate}
    except (ValueError, OSError, KeyError) as exc:
        console.print(f"[red]error:[/red] {exc}")
        manifest.exit_code, manifest.error = 2, "usage"
    manifest.timings = tracker.get_stats()
    if args.json:
        manifest.save(args.json, with_timings=args.timings)
    return manifest.exit_code, manifest


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
