import numpy as np
import pytest

from app.core.exceptions import ConfigSchemaError, DimensionMismatchError, InfeasibleExcitationOrderError
from app.core.subspace import numerical_rank
from app.models.model_set import SystemModel
from app.services.datagen_service import SimConfig, block_hankel, pe_input, simulate


def test_shift_structure(line_data):
    np.testing.assert_array_equal(line_data.X_plus[:, :-1], line_data.X_minus[:, 1:])


def test_line_network_dataset(line_data, line_system):
    assert line_data.X_minus.shape == (5, 100)
    assert numerical_rank(line_data.X_minus) == 5
    np.testing.assert_array_equal(line_data.U_minus, 0.0)
    np.testing.assert_allclose(line_data.Y_minus, line_system.C @ line_data.X_minus)
    np.testing.assert_allclose(line_data.X_plus, line_system.A_true @ line_data.X_minus, atol=1e-14)
    assert np.linalg.norm(line_data.X_minus[:, 0]) == pytest.approx(1.0)


def test_identity_dynamics_hold_state():
    sys = SystemModel(B=np.zeros((2, 1)), C=[[1.0, 0.0]], D=np.zeros((1, 1)),
                      E=np.zeros((2, 0)), F=np.zeros((1, 0)), A_true=np.eye(2))
    data = simulate(sys, SimConfig(T=4, x0_mode='given', x0=(1.0, -2.0)))
    np.testing.assert_array_equal(data.X_minus, [[1.0] * 4, [-2.0] * 4])
    np.testing.assert_array_equal(data.Y_minus, [[1.0] * 4])


def test_same_seed_same_data(line_system):
    cfg = SimConfig(T=30, seed=9, input_mode='random')
    first, second = simulate(line_system, cfg), simulate(line_system, cfg)
    np.testing.assert_array_equal(first.stacked(), second.stacked())
    other = simulate(line_system, SimConfig(T=30, seed=10, input_mode='random'))
    assert not np.allclose(first.stacked(), other.stacked())


def test_structural_noise_enters_through_E_and_F(rng):
    sys = SystemModel(B=np.zeros((2, 1)), C=[[1.0, 0.0]], D=np.zeros((1, 1)),
                      E=[[1.0], [0.0]], F=[[0.0]], A_true=np.diag([0.5, 0.2]))
    data = simulate(sys, SimConfig(T=20, seed=1, noise_mode='structural', noise_sigma=0.1))
    residual = data.X_plus - sys.A_true @ data.X_minus
    np.testing.assert_allclose(residual[1], 0.0, atol=1e-15)
    assert np.linalg.norm(residual[0]) > 0


def test_gaussian_noise_is_flagged():
    assert SimConfig(noise_mode='gaussian').outside_noise_model
    assert not SimConfig(noise_mode='structural').outside_noise_model


def test_pe_input_has_full_hankel_rank():
    u = pe_input(4, 2, 40, seed=3)
    assert u.shape == (2, 40)
    assert numerical_rank(block_hankel(u, 4)) == 8


def test_pe_order_too_high():
    with pytest.raises(InfeasibleExcitationOrderError):
        pe_input(6, 2, 12, seed=0)


def test_pe_mode_in_simulation(line_system):
    data = simulate(line_system, SimConfig(T=40, seed=2, input_mode='pe', pe_order=6))
    assert numerical_rank(block_hankel(data.U_minus, 6)) == 6


def test_block_hankel_layout():
    H = block_hankel([[1.0, 2.0, 3.0, 4.0]], 2)
    np.testing.assert_array_equal(H, [[1.0, 2.0, 3.0], [2.0, 3.0, 4.0]])
    with pytest.raises(DimensionMismatchError):
        block_hankel([[1.0, 2.0]], 3)


@pytest.mark.parametrize('kwargs', [
    {'T': 0},
    {'x0_mode': 'fixed'},
    {'x0_mode': 'given'},
    {'input_mode': 'chirp'},
    {'input_mode': 'pe', 'pe_order': 0},
    {'noise_mode': 'white'},
    {'noise_sigma': -1.0},
])
def test_invalid_sim_config(kwargs):
    with pytest.raises(ConfigSchemaError):
        SimConfig(**kwargs)


def test_system_without_dynamics_cannot_simulate():
    sys = SystemModel(B=np.zeros((1, 1)), C=[[1.0]], D=np.zeros((1, 1)), E=np.zeros((1, 0)), F=np.zeros((1, 0)))
    with pytest.raises(ConfigSchemaError):
        simulate(sys, SimConfig(T=5))


def test_columnwise_states(line_columnwise_data, line_system):
    data = line_columnwise_data
    assert data.X_minus.shape == (5, 100)
    assert numerical_rank(data.X_minus) == 5
    np.testing.assert_allclose(data.X_plus, line_system.A_true @ data.X_minus, atol=1e-14)
    np.testing.assert_allclose(data.Y_minus, line_system.C @ data.X_minus, atol=1e-14)
    # columns are not one trajectory
    assert not np.allclose(data.X_plus[:, :-1], data.X_minus[:, 1:])


def test_columnwise_with_input(line_system):
    data = simulate(line_system, SimConfig(T=12, seed=5, state_mode='columnwise', input_mode='random'))
    np.testing.assert_allclose(data.X_plus, line_system.A_true @ data.X_minus + line_system.B @ data.U_minus,
                               atol=1e-14)
    assert np.any(data.U_minus != 0.0)


def test_unknown_state_mode():
    with pytest.raises(ConfigSchemaError):
        SimConfig(state_mode='shuffled')
    assert SimConfig(state_mode='columnwise').to_dict()['state_mode'] == 'columnwise'
