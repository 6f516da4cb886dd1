"""
Unobservability Service - distance to unobservability and the lower-bound audit

    d(A) = inf over complex λ of σ_min([λ I - A; C])

is evaluated on a half-disc grid (σ_min is symmetric under conjugation for
real A, C), refined on shrinking local grids and polished with Nelder-Mead.
The model-set version takes the infimum over Σ(D): exact when Σ(D) is a
single matrix, a sampled upper bound otherwise.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import minimize

from app.core.exceptions import DimensionMismatchError, EmptyModelSetError, UnsupportedHypothesisError
from app.core.subspace import DEFAULT_TOL, Tolerance, as_matrix
from app.models.model_set import (
    Annihilator, Dataset, SystemModel, compute_pqr, sigma_direction_basis, sigma_least_squares,
    sigma_representative, sigma_residual,
)
from app.services.min_norm_service import MinNormSolution

logger = logging.getLogger(__name__)

# pencils per batched SVD call
BATCH_SIZE = 4096


@dataclass(frozen=True)
class GridConfig:
    step: float = 0.05
    refine_rounds: int = 2
    refine_factor: int = 10
    polish: bool = True

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"Grid step must be positive, got {self.step}")

    @classmethod
    def from_config(cls, config, step: Optional[float] = None) -> 'GridConfig':
        return cls(
            step=float(step if step is not None else config.GRID_STEP),
            refine_rounds=config.GRID_REFINE_ROUNDS,
            refine_factor=config.GRID_REFINE_FACTOR,
        )


@dataclass
class ModelSetDistance:
    value: float
    sampled: bool
    samples: int = 1
    argmin: complex = 0j

    def to_dict(self):
        return {
            'value': self.value,
            'sampled': self.sampled,
            'samples': self.samples,
            'argmin': [self.argmin.real, self.argmin.imag],
        }


@dataclass
class BoundCheck:
    lhs: float
    rhs: float
    holds: bool
    d_unobs: float
    sigma_min_x_minus: float
    sampled: bool = False

    def to_dict(self):
        return {
            'lhs': self.lhs,
            'rhs': self.rhs,
            'holds': self.holds,
            'd_unobs': self.d_unobs,
            'sigma_min_X_minus': self.sigma_min_x_minus,
            'sampled': self.sampled,
        }


def pencil_sigma_min(A, C, lams) -> np.ndarray:
    """σ_min([λ I - A; C]) for every λ in ``lams`` (batched SVD)."""
    A, C = np.asarray(A, dtype=float), np.asarray(C, dtype=float)
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    n = A.shape[0]
    eye = np.eye(n)
    out = np.empty(lams.shape[0])
    for start in range(0, lams.shape[0], BATCH_SIZE):
        chunk = lams[start:start + BATCH_SIZE]
        top = chunk[:, None, None] * eye - A
        bottom = np.broadcast_to(C.astype(complex), (chunk.shape[0],) + C.shape)
        stacked = np.concatenate([top, bottom], axis=1)
        out[start:start + chunk.shape[0]] = np.linalg.svd(stacked, compute_uv=False)[:, -1]
    return out


def _half_disc(radius: float, step: float) -> np.ndarray:
    xs = np.arange(-radius, radius + step, step)
    ys = np.arange(0.0, radius + step, step)
    X, Y = np.meshgrid(xs, ys)
    points = (X + 1j * Y).ravel()
    return points[np.abs(points) <= radius + step]


def d_unobs_detail(A, C, grid: Optional[GridConfig] = None,
                   candidates: Optional[Iterable[complex]] = None):
    """
    Distance to unobservability and the minimizing λ.

    Returns:
        (value, argmin)
    """
    grid = grid or GridConfig()
    A, C = as_matrix(A, 'A'), as_matrix(C, 'C')
    n = A.shape[0]
    if A.shape != (n, n) or C.shape[1] != n:
        raise DimensionMismatchError('d_unobs', f'A {n}x{n}, C p x {n}', (A.shape, C.shape))

    eigenvalues = np.linalg.eigvals(A)
    radius = 1.5 * float(np.max(np.abs(eigenvalues))) + 1.0
    points = [complex(lam.real, abs(lam.imag)) for lam in eigenvalues]
    points.extend(complex(c.real, abs(c.imag)) for c in (candidates or ()))
    points = np.concatenate([np.array(points, dtype=complex), _half_disc(radius, grid.step)])

    values = pencil_sigma_min(A, C, points)
    index = int(np.argmin(values))
    best_value, best = float(values[index]), complex(points[index])

    step = grid.step
    for _ in range(grid.refine_rounds):
        fine = step / grid.refine_factor
        offsets = np.arange(-grid.refine_factor, grid.refine_factor + 1) * fine
        X, Y = np.meshgrid(best.real + offsets, best.imag + offsets)
        local = (X + 1j * np.abs(Y)).ravel()
        local_values = pencil_sigma_min(A, C, local)
        j = int(np.argmin(local_values))
        if local_values[j] < best_value:
            best_value, best = float(local_values[j]), complex(local[j])
        step = fine

    if grid.polish:
        def sigma(x):
            return float(pencil_sigma_min(A, C, [complex(x[0], abs(x[1]))])[0])

        result = minimize(sigma, x0=[best.real, best.imag], method='Nelder-Mead',
                          options={'xatol': 1e-10, 'fatol': 1e-14, 'maxiter': 400})
        if result.fun < best_value:
            best_value, best = float(result.fun), complex(result.x[0], abs(result.x[1]))

    logger.debug(f"d_unobs = {best_value:.6e} at lambda = {best:.6g}")
    return best_value, best


def d_unobs(A, C, grid: Optional[GridConfig] = None, candidates: Optional[Iterable[complex]] = None) -> float:
    """inf over complex λ of σ_min([λ I - A; C])."""
    return d_unobs_detail(A, C, grid, candidates)[0]


def d_unobs_model_set(data: Dataset, sys: SystemModel, ann: Annihilator, tol: Tolerance = DEFAULT_TOL,
                      grid: Optional[GridConfig] = None, samples: int = 32, seed: Optional[int] = None,
                      candidates: Optional[Iterable[complex]] = None) -> ModelSetDistance:
    """
    Distance to unobservability over the model set Σ(D).

    Args:
        data: Trajectory data
        sys: Known structure matrices
        ann: Noise annihilator
        tol: Tolerance regime
        grid: Grid settings for each d_unobs evaluation
        samples: Members evaluated when Σ(D) is not a singleton
        seed: Seed of the member sampler
        candidates: Extra λ points evaluated before the grid

    Returns:
        ModelSetDistance; ``sampled`` marks an upper bound from random members

    Raises:
        EmptyModelSetError: no A satisfies R = Q A P
    """
    params = compute_pqr(data, sys, ann)
    A0 = sigma_representative(params, tol)
    if A0 is None:
        raise EmptyModelSetError(sigma_residual(sigma_least_squares(params), params))
    candidates = list(candidates or ())

    free = sigma_direction_basis(params, tol)
    if free.shape[0] == 0:
        value, argmin = d_unobs_detail(A0, sys.C, grid, candidates)
        return ModelSetDistance(value=value, sampled=False, samples=1, argmin=argmin)

    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.linalg.norm(A0)))
    best_value, best_argmin = d_unobs_detail(A0, sys.C, grid, candidates)
    for _ in range(max(samples - 1, 0)):
        coeffs = rng.standard_normal(free.shape[0]) * scale / np.sqrt(free.shape[0])
        member = A0 + np.tensordot(coeffs, free, axes=1)
        value, argmin = d_unobs_detail(member, sys.C, grid, candidates)
        if value < best_value:
            best_value, best_argmin = value, argmin
    logger.warning(
        f"Model set has {free.shape[0]} free direction(s); d_unobs is a sampled upper bound "
        f"over {max(samples, 1)} member(s)"
    )
    return ModelSetDistance(value=best_value, sampled=True, samples=max(samples, 1), argmin=best_argmin)


def theorem2_check(solution: MinNormSolution, data: Dataset, sys: SystemModel, ann: Annihilator,
                   tol: Tolerance = DEFAULT_TOL, grid: Optional[GridConfig] = None,
                   samples: int = 32, seed: Optional[int] = None) -> BoundCheck:
    """
    Audit ||Δ||_F >= d_unobs(Σ(D)) σ_min(X_-) for a min-norm attack.

    λ* is passed to the metric as a candidate point.

    Raises:
        UnsupportedHypothesisError: the annihilator is not the noise-free one
    """
    if not ann.noise_free:
        raise UnsupportedHypothesisError("The lower-bound audit needs noise-free data (M = I, N = 0)")
    distance = d_unobs_model_set(data, sys, ann, tol, grid, samples, seed,
                                 candidates=[solution.lambda_star])
    singular_values = np.linalg.svd(data.X_minus, compute_uv=False)
    sigma_min = float(singular_values[-1]) if data.T >= data.n else 0.0
    lhs = solution.frob_norm
    rhs = distance.value * sigma_min
    holds = lhs >= rhs - 1e-8 * max(1.0, lhs)
    solution.theorem2_lower_bound = rhs
    logger.info(f"Lower-bound audit: ||Delta||_F = {lhs:.6e}, bound = {rhs:.6e}, holds {holds}")
    return BoundCheck(lhs=lhs, rhs=rhs, holds=holds, d_unobs=distance.value,
                      sigma_min_x_minus=sigma_min, sampled=distance.sampled)
