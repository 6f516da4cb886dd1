import numpy as np
import pytest

from app.core.subspace import Tolerance
from app.models.model_set import SystemModel, compute_annihilator
from app.services.attack_service import AttackSpec
from app.services.datagen_service import SimConfig, paper_example_system, simulate

LINE_NETWORK_LAMBDA = 0.5014
LINE_NETWORK_X0 = np.array([0.0, 0.0, -0.0194, 0.0776, 0.0004])


@pytest.fixture(scope="session")
def seed():
    return 42


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture(scope="session")
def tol():
    return Tolerance()


@pytest.fixture(scope="session")
def line_system():
    return paper_example_system()


@pytest.fixture(scope="session")
def line_data(line_system, seed):
    # zero input, random initial state, no noise
    return simulate(line_system, SimConfig(T=100, seed=seed))


@pytest.fixture(scope="session")
def line_columnwise_data(line_system, seed):
    # independent standard normal columns of X_-
    return simulate(line_system, SimConfig(T=100, seed=seed, state_mode='columnwise'))


@pytest.fixture(scope="session")
def line_ann(line_system, tol):
    return compute_annihilator(line_system.E, line_system.F, tol)


@pytest.fixture
def random_system(rng):
    """Factory for noise-free systems with a stable random A."""
    def _make(n, m, p, B_zero=False, D_zero=True):
        A = rng.standard_normal((n, n))
        A *= 0.9 / max(1.0, np.max(np.abs(np.linalg.eigvals(A))))
        B = np.zeros((n, m)) if B_zero else rng.standard_normal((n, m))
        C = rng.standard_normal((p, n))
        D = np.zeros((p, m)) if D_zero else rng.standard_normal((p, m))
        return SystemModel(B=B, C=C, D=D, E=np.zeros((n, 0)), F=np.zeros((p, 0)), A_true=A)
    return _make


@pytest.fixture(scope="session")
def line_spec():
    return AttackSpec(LINE_NETWORK_LAMBDA, LINE_NETWORK_X0, [0.0])
