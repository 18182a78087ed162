#!/usr/bin/env python3
"""
Boolean quadratic maximization: lift, mixing method, rounding, and the exhaustive oracle.
"""

import itertools
import logging
import statistics

import numpy as np
import pytest

from boolquad import (
    BRUTE_FORCE_MAX_P,
    BoolQuadError,
    SdpSolverConfig,
    _rounding_candidates,
    brute_force,
    default_rank,
    dump_quadratic,
    lift,
    mixing_solve,
    quadratic_value,
    round_solution,
    solve,
    solve_exhaustive,
    to_binary,
)
from conftest import random_psd
from tensor_core import read_csv_matrix

pytestmark = pytest.mark.core


def all_codes(p):
    return [np.array(bits, dtype=np.int8) for bits in itertools.product((0, 1), repeat=p)]


# --- lift --------------------------------------------------------------------

def test_lift_layout(rng):
    A = random_psd(rng, 3)
    C = lift(A).ctilde
    assert C.shape == (4, 4)
    assert C[0, 0] == pytest.approx(A.sum())
    np.testing.assert_allclose(C[0, 1:], A.sum(axis=0))
    np.testing.assert_allclose(C[1:, 0], A.sum(axis=1))
    np.testing.assert_array_equal(C[1:, 1:], A)
    assert lift(A).p == 3


def test_lift_scalar():
    np.testing.assert_array_equal(lift(np.array([[2.0]])).ctilde, [[2.0, 2.0], [2.0, 2.0]])
    assert not np.any(lift(np.zeros((3, 3))).ctilde)


def test_lift_preserves_every_value(rng):
    A = random_psd(rng, 4, rank=2)
    C = lift(A).ctilde
    for z in all_codes(4):
        y = np.concatenate(([1.0], 2.0 * z - 1.0))
        assert 0.25 * y @ C @ y == pytest.approx(quadratic_value(A, z), rel=1e-12, abs=1e-12)


def test_asymmetric_matrix_rejected():
    with pytest.raises(BoolQuadError, match="symmetric"):
        lift(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(BoolQuadError):
        brute_force(np.ones((2, 3)))


# --- exhaustive oracle -------------------------------------------------------

def test_brute_force_single_entry():
    z, value = brute_force(np.array([[1.0]]))
    assert z.tolist() == [1] and value == 1.0


def test_brute_force_zero_matrix_returns_lowest_code():
    z, value = brute_force(np.zeros((3, 3)))
    assert z.tolist() == [0, 0, 0] and value == 0.0


def test_brute_force_ties_go_to_lowest_code():
    # u u^T with u = (1, -1): z = (1,0) and (0,1) both give 1; z_1 is the low bit.
    z, value = brute_force(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert z.tolist() == [1, 0]
    assert value == 1.0


def test_brute_force_identity_takes_everything():
    z, value = brute_force(np.eye(3))
    assert z.tolist() == [1, 1, 1] and value == 3.0


def test_brute_force_matches_enumeration(rng):
    A = random_psd(rng, 6, rank=3)
    best = max(quadratic_value(A, z) for z in all_codes(6))
    _, value = brute_force(A)
    assert value == pytest.approx(best, rel=1e-12)


def test_brute_force_size_limit():
    with pytest.raises(BoolQuadError, match="limited"):
        brute_force(np.zeros((BRUTE_FORCE_MAX_P + 1, BRUTE_FORCE_MAX_P + 1)))


# --- configuration -----------------------------------------------------------

@pytest.mark.parametrize("p, expected", [(1, 3), (3, 4), (12, 7)])
def test_default_rank(p, expected):
    assert default_rank(p) == expected


@pytest.mark.parametrize(
    "kwargs",
    [{"rank": 1}, {"max_sweeps": 0}, {"tol": 0.0}, {"rounding_trials": 0}, {"seed": -1}],
)
def test_sdp_config_validation(kwargs):
    with pytest.raises(BoolQuadError):
        SdpSolverConfig(**kwargs)


# --- mixing method -----------------------------------------------------------

def test_mixing_scalar_reaches_analytic_optimum():
    # Y = [[1, y], [y, 1]] gives 4 + 4y, maximized at y = 1.
    result = mixing_solve(lift(np.array([[2.0]])).ctilde, SdpSolverConfig(seed=3))
    assert result.objective == pytest.approx(8.0, rel=1e-9)
    assert result.converged


def test_mixing_needs_consecutive_quiet_sweeps():
    result = mixing_solve(lift(np.array([[2.0]])).ctilde, SdpSolverConfig(seed=3))
    assert result.sweeps >= 3
    quiet = np.abs(np.diff(result.history[-4:]))
    assert np.all(quiet[-3:] <= 1e-6 * 8.0 / 2), "the last three sweeps stay under the per-column tolerance"


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_desk_sized_subproblem_stays_under_the_relaxation(caplog, seed):
    # gradient Gram of a 20-row unfolding with entries in the thousands
    G = 30.0 * np.random.default_rng(seed).standard_normal((20, 100))
    with caplog.at_level(logging.WARNING, logger="bmpfit.boolquad"):
        sol = solve(G @ G.T, SdpSolverConfig(seed=seed))
    assert "exceeds" not in caplog.text, caplog.text
    assert sol.value <= sol.sdp_objective * (1 + 1e-4)


def test_mixing_zero_matrix_stays_feasible():
    result = mixing_solve(np.zeros((4, 4)), SdpSolverConfig(max_sweeps=5))
    assert result.objective == 0.0
    np.testing.assert_allclose(np.linalg.norm(result.factor, axis=0), 1.0, atol=1e-12)


def test_mixing_objective_never_decreases(rng):
    C = lift(random_psd(rng, 8, rank=3)).ctilde
    result = mixing_solve(C, SdpSolverConfig(max_sweeps=60, tol=1e-12, seed=4))
    diffs = np.diff(result.history)
    assert np.all(diffs >= -1e-9 * max(1.0, abs(result.objective))), "sweep objective must be non-decreasing"
    np.testing.assert_allclose(np.linalg.norm(result.factor, axis=0), 1.0, atol=1e-12)


@pytest.mark.parametrize("p", [2, 4, 6])
def test_feasibility_sandwich(rng, p):
    A = random_psd(rng, p, rank=2)
    cfg = SdpSolverConfig(max_sweeps=3000, tol=1e-12, seed=1)
    sol = solve(A, cfg)
    _, optimum = brute_force(A)
    assert sol.value <= optimum + 1e-9, "no feasible z can beat the exhaustive optimum"
    assert optimum <= sol.sdp_objective * (1 + 1e-4) + 1e-9, (
        f"relaxation {sol.sdp_objective} must bound the optimum {optimum}"
    )


# --- rounding ----------------------------------------------------------------

def test_rounding_identical_columns_gives_all_ones():
    V = np.tile(np.array([[0.6], [0.8]]), (1, 4))
    C = lift(np.eye(3)).ctilde
    y, _ = round_solution(V, C, SdpSolverConfig(rounding_trials=5, one_opt=False))
    assert np.all(y == y[0]), "identical columns fall on the same side of every hyperplane"
    assert to_binary(y).tolist() == [1, 1, 1]


def test_rounding_scalar_aligns_dummy_and_variable():
    C = lift(np.array([[2.0]])).ctilde
    V = mixing_solve(C, SdpSolverConfig(seed=8)).factor
    y, value = round_solution(V, C, SdpSolverConfig(seed=8))
    assert y[0] * y[1] == 1 and value == pytest.approx(8.0)
    assert to_binary(y).tolist() == [1]


def test_one_opt_never_lowers_a_candidate(rng):
    C = lift(random_psd(rng, 7, rank=2)).ctilde
    V = mixing_solve(C, SdpSolverConfig(max_sweeps=5, seed=2)).factor
    plain = _rounding_candidates(V, C, SdpSolverConfig(rounding_trials=20, one_opt=False, seed=9))
    improved = _rounding_candidates(V, C, SdpSolverConfig(rounding_trials=20, one_opt=True, seed=9))
    for (v0, t0, _), (v1, t1, _) in zip(plain, improved):
        assert t0 == t1
        assert v1 >= v0 - 1e-9


def test_to_binary_normalizes_dummy_sign():
    assert to_binary(np.array([-1, 1, -1])).tolist() == [0, 1]
    assert to_binary(np.array([1, 1, -1])).tolist() == [1, 0]
    with pytest.raises(BoolQuadError):
        to_binary(np.array([1, 0, -1]))


# --- solve -------------------------------------------------------------------

def test_zero_matrix_signals_zero_gradient():
    sol = solve(np.zeros((4, 4)), SdpSolverConfig())
    assert sol.zero_gradient
    assert sol.z.tolist() == [0, 0, 0, 0]


def test_single_nonzero_row_selects_it():
    # G = e1 u^T with unit u: only z_1 contributes.
    A = np.zeros((3, 3))
    A[0, 0] = 1.0
    sol = solve(A, SdpSolverConfig(seed=5))
    assert sol.z.tolist() == [1, 0, 0]
    assert sol.value == pytest.approx(1.0)


def test_two_identical_rows_are_selected_together():
    g = np.array([0.6, 0.8])
    G = np.vstack([g, g, np.zeros(2)])
    A = G @ G.T
    for sol in (solve(A, SdpSolverConfig(seed=6)), solve_exhaustive(A)):
        assert sol.z.tolist() == [1, 1, 0], f"{sol.method} picked {sol.z.tolist()}"
        assert sol.value == pytest.approx(4.0)


@pytest.mark.parametrize("p", [1, 4, 9])
def test_identity_matrix_selects_every_row(p):
    sol = solve(np.eye(p), SdpSolverConfig(seed=p))
    assert sol.value == pytest.approx(float(p))
    assert sol.z.tolist() == [1] * p


def test_solve_is_deterministic(rng):
    A = random_psd(rng, 9, rank=3)
    cfg = SdpSolverConfig(seed=77)
    a, b = solve(A, cfg), solve(A, cfg)
    assert np.array_equal(a.z, b.z) and a.value == b.value and a.sdp_objective == b.sdp_objective


def test_solve_exhaustive_labels_method(rng):
    sol = solve_exhaustive(random_psd(rng, 4))
    assert sol.method == "exhaustive" and sol.sdp_objective is None


def test_oracle_ratio_over_random_instances(rng):
    ratios = []
    for n in range(50):
        p = int(rng.integers(2, 13))
        A = random_psd(rng, p, rank=int(rng.integers(1, p + 1)))
        sol = solve(A, SdpSolverConfig(seed=n))
        _, optimum = brute_force(A)
        ratio = sol.value / optimum
        assert ratio >= 0.60, f"instance {n} (p={p}) ratio {ratio:.3f} below the approximation guarantee"
        ratios.append(ratio)
    assert statistics.median(ratios) >= 0.95, f"median ratio {statistics.median(ratios):.3f}"


# --- debug dump --------------------------------------------------------------

def test_dump_quadratic_writes_both_matrices(rng, tmp_path):
    A = random_psd(rng, 3)
    a_path, c_path = dump_quadratic(A, tmp_path / "dump", "k1")
    assert a_path.name == "A_k1.csv" and c_path.name == "Ctilde_k1.csv"
    np.testing.assert_array_equal(read_csv_matrix(a_path).as_array(), A)
    np.testing.assert_array_equal(read_csv_matrix(c_path).as_array(), lift(A).ctilde)
