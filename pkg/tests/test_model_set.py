import numpy as np
import pytest

from app.core.exceptions import DimensionMismatchError
from app.core.subspace import kernel
from app.models.model_set import (
    Annihilator, Dataset, SystemModel, compute_annihilator, compute_pqr, sigma_contains,
    sigma_direction_basis, sigma_representative,
)
from app.services.datagen_service import SimConfig, simulate
from app.services.informativity_service import is_informative_SO, model_v_star


def test_noise_free_annihilator_is_identity(tol):
    ann = compute_annihilator(np.zeros((3, 0)), np.zeros((2, 0)), tol)
    assert ann.noise_free
    np.testing.assert_array_equal(ann.M, np.eye(3))
    np.testing.assert_array_equal(ann.N, np.zeros((3, 2)))
    assert ann.check(np.zeros((3, 0)), np.zeros((2, 0)), tol)


def test_annihilator_kills_noise_image(rng, tol):
    E = rng.standard_normal((4, 2))
    F = rng.standard_normal((2, 2))
    ann = compute_annihilator(E, F, tol)
    assert not ann.noise_free
    assert ann.rows == 4
    np.testing.assert_allclose(ann.M @ E + ann.N @ F, 0.0, atol=1e-12)
    assert ann.check(E, F, tol)


def test_true_model_in_set(random_system, tol):
    sys = random_system(3, 1, 2)
    data = simulate(sys, SimConfig(T=20, seed=1, input_mode='random'))
    params = compute_pqr(data, sys, Annihilator.noise_free_for(3, 2))
    assert sigma_contains(sys.A_true, params, tol)
    A0 = sigma_representative(params, tol)
    np.testing.assert_allclose(A0, sys.A_true, atol=1e-8)
    assert sigma_direction_basis(params, tol).shape == (0, 3, 3)


def test_structural_noise_keeps_true_model(rng, tol):
    n, p, l = 3, 2, 1
    A = np.diag([0.5, 0.3, -0.2])
    sys = SystemModel(B=rng.standard_normal((n, 1)), C=rng.standard_normal((p, n)), D=np.zeros((p, 1)),
                      E=rng.standard_normal((n, l)), F=rng.standard_normal((p, l)), A_true=A)
    data = simulate(sys, SimConfig(T=30, seed=3, input_mode='random', noise_mode='structural', noise_sigma=0.1))
    ann = compute_annihilator(sys.E, sys.F, tol)
    params = compute_pqr(data, sys, ann)
    assert sigma_contains(A, params, tol)


def test_inconsistent_data_give_empty_set(tol):
    sys = SystemModel(B=np.zeros((1, 1)), C=np.ones((1, 1)), D=np.zeros((1, 1)),
                      E=np.zeros((1, 0)), F=np.zeros((1, 0)))
    data = Dataset(X_minus=[[1.0, 1.0]], X_plus=[[1.0, 2.0]], U_minus=[[0.0, 0.0]], Y_minus=[[1.0, 1.0]])
    params = compute_pqr(data, sys, Annihilator.noise_free_for(1, 1))
    assert sigma_representative(params, tol) is None


def test_rank_deficient_data_leave_free_directions(tol):
    sys = SystemModel(B=np.zeros((2, 1)), C=[[1.0, 0.0]], D=np.zeros((1, 1)),
                      E=np.zeros((2, 0)), F=np.zeros((1, 0)))
    X = np.array([[0.0, 0.0, 0.0], [1.0, 0.5, 0.25]])
    data = Dataset(X_minus=X, X_plus=0.5 * X, U_minus=np.zeros((1, 3)), Y_minus=np.zeros((1, 3)))
    params = compute_pqr(data, sys, Annihilator.noise_free_for(2, 1))
    free = sigma_direction_basis(params, tol)
    assert free.shape == (2, 2, 2)
    for direction in free:
        np.testing.assert_allclose(direction @ params.P, 0.0, atol=1e-12)


def test_dataset_shape_checks():
    with pytest.raises(DimensionMismatchError):
        Dataset(X_minus=np.zeros((2, 3)), X_plus=np.zeros((2, 4)),
                U_minus=np.zeros((1, 3)), Y_minus=np.zeros((1, 3)))


def test_dataset_helpers(line_data):
    assert line_data.stacked().shape == (5 + 5 + 1 + 2, 100)
    diff = line_data.replace(X_plus=line_data.X_plus + 1.0).difference(line_data)
    np.testing.assert_allclose(diff['X_plus'], 1.0)
    np.testing.assert_allclose(diff['X_minus'], 0.0)


def test_system_dict_round_trip(line_system):
    restored = SystemModel.from_dict(line_system.to_dict())
    np.testing.assert_array_equal(restored.A_true, line_system.A_true)
    np.testing.assert_array_equal(restored.C, line_system.C)
    assert restored.l == 0


def test_annihilator_keeps_true_model_over_random_pairs(tol):
    rng = np.random.default_rng(31)
    for _ in range(100):
        n, p = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        l = int(rng.integers(1, 3))
        A = rng.standard_normal((n, n))
        A *= 0.9 / max(1.0, np.max(np.abs(np.linalg.eigvals(A))))
        sys = SystemModel(B=rng.standard_normal((n, 1)), C=rng.standard_normal((p, n)), D=np.zeros((p, 1)),
                          E=rng.standard_normal((n, l)), F=rng.standard_normal((p, l)), A_true=A)
        ann = compute_annihilator(sys.E, sys.F, tol)
        np.testing.assert_allclose(ann.M @ sys.E + ann.N @ sys.F, 0.0, atol=1e-10)
        assert ann.rows == n + p - l
        data = simulate(sys, SimConfig(T=3 * n, seed=int(rng.integers(2 ** 31)), state_mode='columnwise',
                                       input_mode='random', noise_mode='structural', noise_sigma=0.1))
        assert sigma_contains(A, compute_pqr(data, sys, ann), tol)


def test_informative_data_leave_only_strongly_observable_models(tol):
    # X_- spans ker C plus one generic direction; Σ keeps three free directions
    rng = np.random.default_rng(8)
    for _ in range(20):
        A = rng.standard_normal((3, 3))
        sys = SystemModel(B=rng.standard_normal((3, 1)), C=rng.standard_normal((2, 3)), D=np.zeros((2, 1)),
                          E=np.zeros((3, 0)), F=np.zeros((2, 0)), A_true=A)
        X = np.column_stack([kernel(sys.C, tol).basis[:, 0], rng.standard_normal(3)])
        U = rng.standard_normal((1, 2))
        data = Dataset(X_minus=X, X_plus=A @ X + sys.B @ U, U_minus=U, Y_minus=sys.C @ X)
        ann = Annihilator.noise_free_for(3, 2)
        assert is_informative_SO(data, sys, ann, tol).informative

        params = compute_pqr(data, sys, ann)
        free = sigma_direction_basis(params, tol)
        assert free.shape[0] == 3
        A0 = sigma_representative(params, tol)
        for _ in range(10):
            member = A0 + np.tensordot(rng.standard_normal(3), free, axes=1)
            assert sigma_contains(member, params, tol)
            assert model_v_star(member, sys.B, sys.C, sys.D, tol).is_zero
