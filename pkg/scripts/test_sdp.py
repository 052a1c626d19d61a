"""SDP data model, reductions, SDPA files and the solvers."""
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra import AlgebraBasis, block_diagonalize
from src.errors import ActionNotAutomorphism, Infeasible, MaxIter, NoInterior, NotInvariant, SDPAParseError
from src.groups import GroupAction, Permutation, group_average, pair_orbits, structure_constants
from src.sdp import (
    LinearSDPBuilder,
    dense_sdp,
    format_sdpa,
    parse_sdpa,
    read_sdpa,
    reconstruct,
    reduce_block,
    reduce_regular,
    reduce_sdpa,
    restrict_to_invariant,
    to_sdpa,
    write_sdpa,
)
from src.sdp.theta import build_theta_prime, solve_theta
from src.solver import INFEASIBLE, OPTIMAL, LPProblem, solve_lp, solve_sdp

TINY = "\n".join([
    '"min x s.t. [[x, -1], [-1, x]] >= 0',
    "1",
    "1",
    "2",
    "1.0",
    "0 1 1 2 1.0",
    "1 1 1 1 1.0",
    "1 1 2 2 1.0",
])


def cyclic(n):
    return GroupAction(n, (Permutation.from_cycles(n, [list(range(n))]),))


def dihedral(n):
    flip = Permutation(tuple((-i) % n for i in range(n)))
    return GroupAction(n, (Permutation.from_cycles(n, [list(range(n))]), flip))


def invariant_objective(action, seed):
    S = np.random.default_rng(seed).standard_normal((action.n, action.n))
    return group_average(S + S.T, pair_orbits(action))


def test_tiny_sdpa_problem_solves():
    problem = parse_sdpa(TINY)
    assert problem.m == 1
    assert problem.block_struct == [2]
    result = solve_sdp(problem)
    assert result.status == OPTIMAL
    assert abs(result.objective - 1.0) <= 1e-6


def test_iteration_cap():
    problem = parse_sdpa(TINY)
    assert solve_sdp(problem, maxiter=1).status == "maxiter"
    with pytest.raises(MaxIter):
        solve_sdp(problem, maxiter=1, strict=True)


MANUAL_EXAMPLE = "\n".join([
    "3",
    "1",
    "2",
    "48 -8 20",
    "0 1 1 1 -11",
    "0 1 2 2 23",
    "1 1 1 1 10",
    "1 1 1 2 4",
    "2 1 2 2 -8",
    "3 1 1 2 -8",
    "3 1 2 2 -2",
])

# drops the middle matrix: [[10 x1 + 11, 4 x1 - 8 x2], [4 x1 - 8 x2, -2 x2 - 23]] is never psd
NO_FEASIBLE_X = "\n".join([
    "2",
    "1",
    "2",
    "48 -8",
    "0 1 1 1 -11",
    "0 1 2 2 23",
    "1 1 1 1 10",
    "1 1 1 2 4",
    "2 1 1 2 -8",
    "2 1 2 2 -2",
])


def test_manual_example_optimum():
    result = solve_sdp(parse_sdpa(MANUAL_EXAMPLE))
    assert result.status == OPTIMAL
    assert result.objective == pytest.approx(-41.9, abs=1e-4)
    assert result.info["weak_duality_violations"] == 0


def test_program_without_feasible_point_reports_instead_of_crashing():
    problem = parse_sdpa(NO_FEASIBLE_X)
    try:
        result = solve_sdp(problem)
    except NoInterior:
        return
    assert result.status == INFEASIBLE
    assert math.isnan(result.objective)


def test_weak_duality_is_checked_on_every_iterate():
    problem = parse_sdpa(TINY)
    for maxiter in (1, 2, 5):
        result = solve_sdp(problem, maxiter=maxiter, strict=False)
        assert result.info["weak_duality_violations"] == 0


def test_sdpa_text_survives_a_write(tmp_path):
    problem = parse_sdpa(TINY)
    path = tmp_path / "tiny.dat-s"
    write_sdpa(problem, path)
    again = read_sdpa(path)
    assert list(again.entries()) == list(problem.entries())
    assert format_sdpa(again) == format_sdpa(problem)


def test_sdpa_punctuation_is_ignored():
    text = TINY.replace("2\n1.0", "{2}\n(1.0)")
    assert parse_sdpa(text).block_struct == [2]


@pytest.mark.parametrize(
    "bad, line",
    [
        ("1 1 3 3 1.0", 9),
        ("2 1 1 1 1.0", 9),
        ("1 1 1", 9),
    ],
)
def test_sdpa_parse_errors_name_the_line(bad, line):
    with pytest.raises(SDPAParseError) as info:
        parse_sdpa(TINY + "\n" + bad)
    assert info.value.line == line


def test_inconsistent_equalities():
    b = LinearSDPBuilder(1)
    b.set_objective([1.0])
    b.add_equality([1.0], 1.0)
    b.add_equality([2.0], 3.0)
    with pytest.raises(Infeasible):
        b.build()


def test_theta_program_uses_edge_orbits():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    sdp = build_theta_prime(edges, 5, cyclic(5))
    assert sdp.orbits.M == 5
    # trace plus one constraint for the edge orbit and its transpose
    assert len(sdp.constraints) == 2
    assert sdp.maximize
    assert build_theta_prime(edges, 5, nonnegative=False).label == "theta"


def test_theta_rejects_bad_inputs():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    swap = GroupAction(5, (Permutation((1, 0, 2, 3, 4)),))
    with pytest.raises(ActionNotAutomorphism):
        build_theta_prime(edges, 5, swap)
    with pytest.raises(ValueError):
        build_theta_prime([(0, 0)], 5)
    with pytest.raises(ValueError):
        build_theta_prime([(0, 7)], 5)


@pytest.mark.parametrize("backend", ["dense", "orbit", "regular", "block"])
def test_theta_of_the_pentagon(backend):
    edges = [(i, (i + 1) % 5) for i in range(5)]
    result = solve_theta(edges, 5, cyclic(5), backend=backend)
    assert result.status == OPTIMAL
    assert abs(result.objective - math.sqrt(5)) <= 1e-6


def test_plain_theta_of_the_pentagon():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    result = solve_theta(edges, 5, cyclic(5), nonnegative=False, backend="regular")
    assert abs(result.objective - math.sqrt(5)) <= 1e-6


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_reductions_preserve_the_optimum(seed):
    # max <C, X> over tr X = 1, X psd is the largest eigenvalue of C
    action = cyclic(6)
    C = invariant_objective(action, seed)
    expected = float(np.linalg.eigvalsh(C)[-1])
    sdp = restrict_to_invariant(C, [np.eye(6)], [1.0], action)
    bd = block_diagonalize(AlgebraBasis.from_orbits(sdp.orbits), seed=seed + 1)
    problems = {
        "dense": dense_sdp(C, [(np.eye(6), 1.0)]),
        "orbit": to_sdpa(sdp),
        "regular": reduce_regular(sdp, structure_constants(sdp.orbits)),
        "coefficient": reduce_block(sdp, bd),
        "parametrized": reduce_block(sdp, bd, mode="parametrized"),
    }
    for name, problem in problems.items():
        result = solve_sdp(problem)
        assert result.status == OPTIMAL, name
        assert abs(result.objective - expected) <= 1e-6, name


def s_by_s(a, b):
    n = a + b
    gens = [Permutation.from_cycles(n, [[0, 1]]), Permutation.from_cycles(n, [[a, a + 1]])]
    if a > 2:
        gens.append(Permutation.from_cycles(n, [list(range(a))]))
    if b > 2:
        gens.append(Permutation.from_cycles(n, [list(range(a, n))]))
    return GroupAction(n, tuple(gens))


def through_interior_point(action, seed, nonnegative):
    """max <C, X> over tr X = 1 and two random invariant constraints, all satisfied by (I + J) / 2n."""
    n = action.n
    X0 = (np.eye(n) + np.ones((n, n))) / (2 * n)
    A = [np.eye(n), invariant_objective(action, 100 + seed), invariant_objective(action, 200 + seed)]
    b = [float(np.sum(Ai * X0)) for Ai in A]
    return restrict_to_invariant(invariant_objective(action, seed), A, b, action, nonnegative=nonnegative)


@pytest.mark.parametrize(
    "seed, action",
    [
        (0, cyclic(7)),
        (1, cyclic(8)),
        (2, dihedral(7)),
        (3, dihedral(8)),
        (4, s_by_s(2, 3)),
        (5, s_by_s(3, 3)),
        (6, s_by_s(4, 4)),
        (7, cyclic(8)),
        (8, dihedral(8)),
        (9, s_by_s(2, 5)),
    ],
)
def test_reductions_agree_on_random_programs(seed, action):
    sdp = through_interior_point(action, seed, nonnegative=seed % 2 == 0)
    baseline = solve_sdp(to_sdpa(sdp))
    assert baseline.status == OPTIMAL
    bd = block_diagonalize(AlgebraBasis.from_orbits(sdp.orbits), seed=seed + 1)
    problems = {
        "regular": reduce_regular(sdp, structure_constants(sdp.orbits)),
        "coefficient": reduce_block(sdp, bd),
        "parametrized": reduce_block(sdp, bd, mode="parametrized"),
    }
    for name, problem in problems.items():
        result = solve_sdp(problem)
        assert result.status == OPTIMAL, name
        assert abs(result.objective - baseline.objective) <= 1e-6, name


def test_reduced_solution_lifts_to_a_feasible_matrix():
    action = GroupAction.symmetric(4)
    C = invariant_objective(action, 3)
    sdp = restrict_to_invariant(C, [np.eye(4)], [1.0], action, nonnegative=True)
    problem = reduce_regular(sdp, structure_constants(sdp.orbits))
    result = solve_sdp(problem)
    X = reconstruct(problem, result.x, sdp.orbits)
    assert abs(np.trace(X) - 1.0) <= 1e-7
    assert np.linalg.eigvalsh(X)[0] >= -1e-7
    assert X.min() >= -1e-7
    assert abs(np.sum(C * X) - result.objective) <= 1e-6


def test_non_invariant_objective_is_rejected():
    C = np.diag([1.0, 0.0, 0.0])
    with pytest.raises(NotInvariant) as info:
        restrict_to_invariant(C, [np.eye(3)], [1.0], cyclic(3))
    assert info.value.generator == 0


@pytest.mark.parametrize("step", ["regular", "block"])
def test_reduce_sdpa_keeps_the_optimum(step):
    action = dihedral(5)
    C = invariant_objective(action, 7)
    sdp = restrict_to_invariant(C, [np.eye(5)], [1.0], action)
    problem = to_sdpa(sdp)
    reduced = reduce_sdpa(parse_sdpa(format_sdpa(problem)), action, step=step)
    assert max(reduced.block_struct) < 5
    a = solve_sdp(problem)
    b = solve_sdp(reduced)
    assert abs(a.objective - b.objective) <= 1e-6


def test_lp_rational_optimum():
    lp = LPProblem(c=[1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6], maximize=True)
    result = solve_lp(lp, mode="rational")
    assert result.status == OPTIMAL
    assert result.objective == Fraction(14, 5)
    assert list(result.x) == [Fraction(8, 5), Fraction(6, 5)]


def test_lp_infeasible():
    lp = LPProblem(c=[1], A_ub=[[1]], b_ub=[-1])
    assert solve_lp(lp).status == INFEASIBLE
