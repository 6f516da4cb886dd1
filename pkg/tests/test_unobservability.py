import numpy as np
import pytest

from app.core.exceptions import EmptyModelSetError, UnsupportedHypothesisError
from app.models.model_set import Annihilator, Dataset, SystemModel, compute_annihilator
from app.services.datagen_service import SimConfig, simulate
from app.services.min_norm_service import alternating_solve, build_problem
from app.services.unobservability_service import (
    GridConfig, d_unobs, d_unobs_detail, d_unobs_model_set, pencil_sigma_min, theorem2_check,
)


@pytest.fixture(scope="module")
def line_solution(line_data, line_system, line_ann, tol):
    return alternating_solve(build_problem(line_data, line_system, line_ann, tol), tol)


def test_unobservable_mode_gives_zero():
    assert d_unobs(np.diag([0.5, 2.0]), [[1.0, 0.0]]) <= 1e-10


def test_full_output_bounds_distance_below():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 3))
    assert d_unobs(A, np.eye(3)) >= 1.0 - 1e-10


def test_scalar_system_distance_is_output_gain():
    value, argmin = d_unobs_detail([[0.3]], [[0.2]])
    assert value == pytest.approx(0.2, abs=1e-9)
    assert argmin.real == pytest.approx(0.3, abs=1e-4)


def test_complex_pair_located():
    # rotation with small output weight: minimum sits near the eigenvalues 0.6 ± 0.8i
    A = np.array([[0.6, -0.8], [0.8, 0.6]])
    value, argmin = d_unobs_detail(A, [[0.05, 0.0]])
    assert value <= 0.05
    assert abs(argmin - complex(0.6, 0.8)) < 0.1


def test_batched_svd_matches_direct(rng):
    A = rng.standard_normal((4, 4))
    C = rng.standard_normal((2, 4))
    lams = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    batched = pencil_sigma_min(A, C, lams)
    for lam, value in zip(lams, batched):
        direct = np.linalg.svd(np.vstack([lam * np.eye(4) - A, C]), compute_uv=False)[-1]
        assert value == pytest.approx(direct, rel=1e-10, abs=1e-14)


def test_grid_step_must_be_positive():
    with pytest.raises(ValueError):
        GridConfig(step=0.0)


def test_singleton_model_set_is_exact(line_data, line_system, line_ann, tol):
    distance = d_unobs_model_set(line_data, line_system, line_ann, tol)
    assert not distance.sampled
    assert distance.samples == 1
    assert distance.value > 0
    assert distance.value == pytest.approx(d_unobs(line_system.A_true, line_system.C), rel=1e-6, abs=1e-12)


def test_rank_deficient_data_give_sampled_value(tol):
    sys = SystemModel(B=np.zeros((2, 1)), C=[[1.0, 0.0]], D=np.zeros((1, 1)),
                      E=np.zeros((2, 0)), F=np.zeros((1, 0)))
    X = np.array([[0.0, 0.0, 0.0], [1.0, 0.5, 0.25]])
    data = Dataset(X_minus=X, X_plus=0.5 * X, U_minus=np.zeros((1, 3)), Y_minus=np.zeros((1, 3)))
    distance = d_unobs_model_set(data, sys, Annihilator.noise_free_for(2, 1), tol, samples=4, seed=1)
    assert distance.sampled
    assert distance.samples == 4
    # every member keeps e2 as an unobservable eigenvector
    assert distance.value <= 1e-8


def test_inconsistent_data_raise(tol):
    sys = SystemModel(B=np.zeros((1, 1)), C=np.ones((1, 1)), D=np.zeros((1, 1)),
                      E=np.zeros((1, 0)), F=np.zeros((1, 0)))
    data = Dataset(X_minus=[[1.0, 1.0]], X_plus=[[1.0, 2.0]], U_minus=[[0.0, 0.0]], Y_minus=[[1.0, 1.0]])
    with pytest.raises(EmptyModelSetError):
        d_unobs_model_set(data, sys, Annihilator.noise_free_for(1, 1), tol)


def test_lower_bound_holds_for_min_norm_attack(line_solution, line_data, line_system, line_ann, tol):
    check = theorem2_check(line_solution, line_data, line_system, line_ann, tol)
    assert check.holds
    assert check.rhs > 0
    assert check.lhs >= check.rhs
    assert not check.sampled
    assert line_solution.theorem2_lower_bound == check.rhs
    assert check.sigma_min_x_minus == pytest.approx(np.linalg.svd(line_data.X_minus, compute_uv=False)[-1])


def test_lower_bound_needs_noise_free_annihilator(line_solution, line_data, line_system, tol):
    ann = compute_annihilator(np.array([[1.0], [0.0], [0.0], [0.0], [0.0]]), np.zeros((2, 1)), tol)
    assert not ann.noise_free
    with pytest.raises(UnsupportedHypothesisError):
        theorem2_check(line_solution, line_data, line_system, ann, tol)


def test_unobservable_model_set_distance(tol):
    sys = SystemModel(B=np.zeros((2, 1)), C=[[1.0, 0.0]], D=np.zeros((1, 1)),
                      E=np.zeros((2, 0)), F=np.zeros((1, 0)), A_true=np.diag([0.5, 0.9]))
    data = simulate(sys, SimConfig(T=6, seed=2, state_mode='columnwise'))
    distance = d_unobs_model_set(data, sys, Annihilator.noise_free_for(2, 1), tol)
    assert not distance.sampled
    assert distance.value <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize('trial', range(50))
def test_lower_bound_over_random_observable_systems(trial, tol):
    rng = np.random.default_rng(3000 + trial)
    n = int(rng.integers(2, 5))
    p = int(rng.integers(1, n))
    A = rng.standard_normal((n, n))
    A *= 0.9 / max(1.0, np.max(np.abs(np.linalg.eigvals(A))))
    sys = SystemModel(B=np.zeros((n, 1)), C=rng.standard_normal((p, n)), D=np.zeros((p, 1)),
                      E=np.zeros((n, 0)), F=np.zeros((p, 0)), A_true=A)
    data = simulate(sys, SimConfig(T=3 * n, seed=trial, state_mode='columnwise'))
    ann = Annihilator.noise_free_for(n, p)
    solution = alternating_solve(build_problem(data, sys, ann, tol), tol)
    check = theorem2_check(solution, data, sys, ann, tol, GridConfig(step=0.05))
    assert check.rhs > 0
    assert check.holds, (check.lhs, check.rhs)
