"""
Datagen Service - seeded data of x_{k+1} = A x_k + B u_k + E w_k, either one
trajectory or independent random state columns

Random draws use numpy's default Generator (PCG64) so that identical seeds
give bitwise-identical datasets.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.exceptions import ConfigSchemaError, DimensionMismatchError, InfeasibleExcitationOrderError
from app.core.subspace import as_vector, numerical_rank
from app.models.model_set import Dataset, SystemModel
from app.utils.io import read_system

logger = logging.getLogger(__name__)

BUILTIN_SYSTEM = 'paper5'
STATE_MODES = ('trajectory', 'columnwise')
X0_MODES = ('random-unit', 'given')
INPUT_MODES = ('zero', 'random', 'pe')
NOISE_MODES = ('none', 'structural', 'gaussian')

PE_REDRAWS = 8

LINE_NETWORK_A = [
    [0.8, 0.1, 0.0, 0.0, 0.0],
    [0.0, 0.7, 0.1, 0.0, 0.0],
    [0.0, 0.0, 0.6, 0.02, 0.0],
    [0.0, 0.0, 0.0, 0.5, 0.05],
    [0.0, 0.0, 0.0, 0.0, 0.4],
]


@dataclass(frozen=True)
class SimConfig:
    """Horizon, seed and the modes of the states, initial state, input and noise."""
    T: int = 100
    seed: int = 42
    state_mode: str = 'trajectory'
    x0_mode: str = 'random-unit'
    x0: Optional[tuple] = None
    input_mode: str = 'zero'
    pe_order: Optional[int] = None
    noise_mode: str = 'none'
    noise_sigma: float = 0.01

    def __post_init__(self):
        if int(self.T) < 1:
            raise ConfigSchemaError('SimConfig', f'T must be >= 1, got {self.T}')
        if self.state_mode not in STATE_MODES:
            raise ConfigSchemaError('SimConfig', f"state_mode must be one of {STATE_MODES}")
        if self.x0_mode not in X0_MODES:
            raise ConfigSchemaError('SimConfig', f"x0_mode must be one of {X0_MODES}")
        if self.x0_mode == 'given' and self.x0 is None:
            raise ConfigSchemaError('SimConfig', "x0_mode 'given' needs x0")
        if self.input_mode not in INPUT_MODES:
            raise ConfigSchemaError('SimConfig', f"input_mode must be one of {INPUT_MODES}")
        if self.input_mode == 'pe' and self.pe_order is not None and not 1 <= self.pe_order <= self.T:
            raise ConfigSchemaError('SimConfig', f'pe_order must lie in [1, T], got {self.pe_order}')
        if self.noise_mode not in NOISE_MODES:
            raise ConfigSchemaError('SimConfig', f"noise_mode must be one of {NOISE_MODES}")
        if self.noise_sigma < 0:
            raise ConfigSchemaError('SimConfig', 'noise_sigma must be nonnegative')

    @property
    def outside_noise_model(self) -> bool:
        return self.noise_mode == 'gaussian'

    def to_dict(self):
        return {
            'T': self.T,
            'seed': self.seed,
            'state_mode': self.state_mode,
            'x0_mode': self.x0_mode,
            'x0': None if self.x0 is None else list(self.x0),
            'input_mode': self.input_mode,
            'pe_order': self.pe_order,
            'noise_mode': self.noise_mode,
            'noise_sigma': self.noise_sigma,
        }


def paper_example_system() -> SystemModel:
    """Five-node line network: upper-triangular A, B = e1 + e4, C selects x1 and x2."""
    A = np.array(LINE_NETWORK_A)
    B = np.array([[1.0], [0.0], [0.0], [1.0], [0.0]])
    C = np.hstack([np.eye(2), np.zeros((2, 3))])
    return SystemModel(B=B, C=C, D=np.zeros((2, 1)), E=np.zeros((5, 0)), F=np.zeros((2, 0)), A_true=A)


def load_system(source: str) -> SystemModel:
    """Resolve 'paper5' to the line network; anything else is read as a system JSON file."""
    if source == BUILTIN_SYSTEM:
        return paper_example_system()
    return read_system(source)


def block_hankel(u, depth: int) -> np.ndarray:
    """
    Depth-``depth`` block-Hankel matrix of an m x T signal.

    Returns:
        (depth*m) x (T - depth + 1) matrix
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    m, T = u.shape
    cols = T - depth + 1
    if depth < 1 or cols < 1:
        raise DimensionMismatchError('block_hankel', f'1 <= depth <= {T}', depth)
    return np.vstack([u[:, i:i + cols] for i in range(depth)])


def pe_input(order: int, m: int, T: int, seed: Optional[int] = None) -> np.ndarray:
    """
    Seeded Gaussian input that is persistently exciting of the given order.

    Raises:
        InfeasibleExcitationOrderError: order*m > T - order + 1
    """
    if order < 1 or order * m > T - order + 1:
        raise InfeasibleExcitationOrderError(order, m, T)
    rng = np.random.default_rng(seed)
    for attempt in range(1, PE_REDRAWS + 1):
        u = rng.standard_normal((m, T))
        if numerical_rank(block_hankel(u, order)) == order * m:
            return u
        logger.warning(f"PE input draw {attempt} lost rank; drawing again")
    raise InfeasibleExcitationOrderError(order, m, T)


def simulate(sys: SystemModel, cfg: SimConfig) -> Dataset:
    """
    Generate (X_-, X_+, U_-, Y_-) from x_{k+1} = A x_k + B u_k + E w_k.

    ``trajectory`` runs one trajectory of length T from x_0; ``columnwise``
    draws every column of X_- as an independent standard normal initial state
    and advances each by one step. Structural noise enters through E and F;
    Gaussian noise is added to the states and outputs directly and falls
    outside the structural model.
    """
    if sys.A_true is None:
        raise ConfigSchemaError('simulate', 'system has no A matrix')
    A, B, C, D, E, F = sys.A_true, sys.B, sys.C, sys.D, sys.E, sys.F
    n, m, p, l, T = sys.n, sys.m, sys.p, sys.l, int(cfg.T)
    rng = np.random.default_rng(cfg.seed)

    if cfg.state_mode == 'columnwise':
        x0 = None
        X_minus = rng.standard_normal((n, T))
    elif cfg.x0_mode == 'given':
        x0 = as_vector(cfg.x0, 'x0')
        if x0.shape[0] != n:
            raise DimensionMismatchError('simulate.x0', n, x0.shape[0])
    else:
        x0 = rng.standard_normal(n)
        x0 /= np.linalg.norm(x0)

    if cfg.input_mode == 'zero':
        U = np.zeros((m, T))
    elif cfg.input_mode == 'random':
        U = rng.standard_normal((m, T))
    else:
        order = cfg.pe_order if cfg.pe_order is not None else n + 1
        U = pe_input(order, m, T, seed=int(rng.integers(2 ** 32)))

    W = rng.standard_normal((l, T)) * cfg.noise_sigma if cfg.noise_mode == 'structural' else np.zeros((l, T))
    if cfg.noise_mode == 'gaussian':
        V_state = rng.standard_normal((n, T)) * cfg.noise_sigma
        V_output = rng.standard_normal((p, T)) * cfg.noise_sigma
        logger.warning("Gaussian noise lies outside the structural noise model; informativity results are heuristic")
    else:
        V_state, V_output = np.zeros((n, T)), np.zeros((p, T))

    if x0 is None:
        Y = C @ X_minus + D @ U + F @ W + V_output
        X_plus = A @ X_minus + B @ U + E @ W + V_state
    else:
        X = np.empty((n, T + 1))
        Y = np.empty((p, T))
        X[:, 0] = x0
        for k in range(T):
            Y[:, k] = C @ X[:, k] + D @ U[:, k] + F @ W[:, k] + V_output[:, k]
            X[:, k + 1] = A @ X[:, k] + B @ U[:, k] + E @ W[:, k] + V_state[:, k]
        X_minus, X_plus = X[:, :T], X[:, 1:]

    logger.info(f"Simulated T={T} ({cfg.state_mode} states, input {cfg.input_mode}, "
                f"noise {cfg.noise_mode}, seed {cfg.seed})")
    return Dataset(X_minus=X_minus, X_plus=X_plus, U_minus=U, Y_minus=Y)
