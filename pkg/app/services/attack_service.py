"""
Attack Service - stealthy invertible data transformations

Synthesizes a block-diagonal transformation Φ_a = blk-diag(Φ_-^X, Φ_+^X, Φ_-^U, Φ_-^Y)
that embeds a weakly unobservable eigenpair (λ̃, x̃_0) in the data while leaving
every direction of J*(D) untouched:

    1. pick v ∈ J*(D)^⊥ outside Z^{-1} Π_O(Z) for every transformed block Z
    2. per block pick u_Z ⊥ Π_O(Z), scale to ξ_Z = u_Z / (u_Zᵀ Z v)
    3. Φ_Z = I + (z_tar - Z v) ξ_Zᵀ

Blocks whose target is zero are pinned: Φ_Z = I and v is restricted to ker Z.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.linalg import block_diag

from app.core.exceptions import (
    AttackSpecError, UnobservableTargetError, DimensionMismatchError, DimensionalConditionError,
    DirectionExhaustedError, RankOneConditionError, PivotTooSmallError,
)
from app.core.schemas import ATTACK_SPEC_SCHEMA, validate_document
from app.core.subspace import (
    DEFAULT_TOL, Subspace, Tolerance, as_matrix, as_vector, complement, contains, image,
    numerical_rank, preimage, preimage_within, spectral_norm, subspace_sum,
)
from app.models.model_set import (
    BLOCK_NAMES, Annihilator, Dataset, SystemModel, compute_pqr, sigma_contains,
    sigma_representative, sigma_residual,
)
from app.services.informativity_service import is_informative_SO, max_coeff_space
from app.utils.io import read_json

logger = logging.getLogger(__name__)

DEFAULT_RETRIES = 64
DEFAULT_MARGIN_FACTOR = 100.0


@dataclass(frozen=True, eq=False)
class AttackSpec:
    """Injected eigenpair (λ̃, x̃_0) and input direction ũ_0."""
    lambda_tilde: float
    x0_tilde: np.ndarray
    u0_tilde: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'lambda_tilde', float(self.lambda_tilde))
        object.__setattr__(self, 'x0_tilde', as_vector(self.x0_tilde, 'x0'))
        object.__setattr__(self, 'u0_tilde', as_vector(self.u0_tilde, 'u0'))
        if not np.isfinite(self.lambda_tilde):
            raise AttackSpecError(f"lambda must be finite, got {self.lambda_tilde}")

    def validate(self, sys: SystemModel, tol: Tolerance = DEFAULT_TOL) -> 'AttackSpec':
        """
        Check dimensions, x̃_0 ≠ 0 and C x̃_0 = 0.

        Raises:
            AttackSpecError: any invariant fails
        """
        if self.x0_tilde.shape[0] != sys.n:
            raise AttackSpecError(f"x0 has {self.x0_tilde.shape[0]} entries, system has n = {sys.n}")
        if self.u0_tilde.shape[0] != sys.m:
            raise AttackSpecError(f"u0 has {self.u0_tilde.shape[0]} entries, system has m = {sys.m}")
        x0_norm = float(np.linalg.norm(self.x0_tilde))
        if x0_norm <= tol.rel:
            raise AttackSpecError("x0 must be nonzero")
        output = float(np.linalg.norm(sys.C @ self.x0_tilde))
        if output > tol.residual * max(1.0, spectral_norm(sys.C) * x0_norm):
            raise AttackSpecError(f"x0 must lie in ker C (||C x0|| = {output:.3e})")
        return self

    def to_dict(self) -> Dict:
        return {
            'lambda': self.lambda_tilde,
            'x0': self.x0_tilde.tolist(),
            'u0': self.u0_tilde.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'AttackSpec':
        return cls(lambda_tilde=data['lambda'], x0_tilde=data['x0'], u0_tilde=data['u0'])


@dataclass(frozen=True, eq=False)
class BlockTransform:
    """Per-block maps of Φ_a; identity blocks for untouched data."""
    phi_x_minus: np.ndarray
    phi_x_plus: np.ndarray
    phi_u: np.ndarray
    phi_y: np.ndarray

    def __post_init__(self):
        for name in ('phi_x_minus', 'phi_x_plus', 'phi_u', 'phi_y'):
            value = as_matrix(getattr(self, name), name)
            if value.shape[0] != value.shape[1]:
                raise DimensionMismatchError(f'BlockTransform.{name}', 'square', value.shape)
            object.__setattr__(self, name, value)

    @classmethod
    def identity(cls, n: int, m: int, p: int) -> 'BlockTransform':
        return cls(np.eye(n), np.eye(n), np.eye(m), np.eye(p))

    def blocks(self) -> Dict[str, np.ndarray]:
        return dict(zip(BLOCK_NAMES, (self.phi_x_minus, self.phi_x_plus, self.phi_u, self.phi_y)))

    def full(self) -> np.ndarray:
        """Φ_a as one block-diagonal matrix."""
        return block_diag(self.phi_x_minus, self.phi_x_plus, self.phi_u, self.phi_y)

    def is_nonsingular(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(numerical_rank(phi, tol) == phi.shape[0] for phi in self.blocks().values() if phi.size)

    def apply(self, data: Dataset) -> Dataset:
        """D̃ = Φ_a D, blockwise."""
        mapped = {name: phi @ data.block(name) for name, phi in self.blocks().items()}
        return Dataset(**mapped)


@dataclass
class BlockFeasibility:
    block: str
    dim_pi: int
    rank_z: int
    pinned: bool = False

    @property
    def dimensional_ok(self) -> bool:
        return self.dim_pi < self.rank_z

    def to_dict(self) -> Dict:
        return {
            'block': self.block,
            'dim_pi': self.dim_pi,
            'rank_z': self.rank_z,
            'dimensional_ok': self.dimensional_ok,
            'pinned': self.pinned,
        }


@dataclass
class FeasibilityVerdict:
    blocks: Dict[str, BlockFeasibility]
    common_v_exists: bool = False
    direction: Optional[np.ndarray] = None
    rejected: List[str] = field(default_factory=list)

    @property
    def pinned(self) -> Tuple[str, ...]:
        return tuple(name for name, b in self.blocks.items() if b.pinned)

    @property
    def failing_blocks(self) -> List[str]:
        """Transformed blocks that violate dim Π_O(Z) < rank Z."""
        return [name for name, b in self.blocks.items() if not b.pinned and not b.dimensional_ok]

    @property
    def dimensional_ok(self) -> bool:
        return not self.failing_blocks

    def to_dict(self) -> Dict:
        return {
            'blocks': {name: b.to_dict() for name, b in self.blocks.items()},
            'common_v_exists': self.common_v_exists,
            'pinned': list(self.pinned),
            'rejected': list(self.rejected),
        }


@dataclass
class AttackResult:
    """Outcome of one attack synthesis run."""
    spec: AttackSpec
    transform: BlockTransform
    original: Dataset
    attacked: Dataset
    v: np.ndarray
    x1_tilde: np.ndarray
    y0_tilde: np.ndarray
    j_star: Subspace
    pinned: Tuple[str, ...] = ()
    xi: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def delta(self) -> Dict[str, np.ndarray]:
        return self.attacked.difference(self.original)

    def to_dict(self) -> Dict:
        return {
            'spec': self.spec.to_dict(),
            'v': self.v.tolist(),
            'x1_tilde': self.x1_tilde.tolist(),
            'y0_tilde': self.y0_tilde.tolist(),
            'dim_j_star': self.j_star.dim,
            'pinned': list(self.pinned),
            'xi': {name: xi.tolist() for name, xi in self.xi.items()},
            'delta_fro': {name: float(np.linalg.norm(d)) for name, d in self.delta.items()},
        }


@dataclass
class AttackVerificationReport:
    """Post-attack checks; each failure carries its residual."""
    dim_j_star_before: int
    dim_j_star_after: int
    v_orthogonality: float
    inclusion_residual: float
    inclusion_ok: bool
    sigma_nonempty: bool
    eigen_residual: Optional[float]
    eigen_ok: bool
    sigma_member_residual: Optional[float]
    sigma_member_ok: bool
    not_informative: bool
    witness: Optional[np.ndarray] = None
    stealth_residual: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {
            'passed': self.passed,
            'dim_j_star_before': self.dim_j_star_before,
            'dim_j_star_after': self.dim_j_star_after,
            'v_orthogonality': self.v_orthogonality,
            'inclusion_residual': self.inclusion_residual,
            'inclusion_ok': self.inclusion_ok,
            'sigma_nonempty': self.sigma_nonempty,
            'eigen_residual': self.eigen_residual,
            'eigen_ok': self.eigen_ok,
            'sigma_member_residual': self.sigma_member_residual,
            'sigma_member_ok': self.sigma_member_ok,
            'not_informative': self.not_informative,
            'witness': None if self.witness is None else self.witness.tolist(),
            'stealth_residual': self.stealth_residual,
            'failures': list(self.failures),
        }


def load_attack_spec(path: str) -> AttackSpec:
    """Load an attack spec (keys lambda, x0, u0); invariants are checked later against the system."""
    document = read_json(path)
    validate_document(document, ATTACK_SPEC_SCHEMA, path)
    return AttackSpec.from_dict(document)


def pi_O(Z, j_star: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Π_O(Z) = Z J*(D)."""
    Z = as_matrix(Z, 'Z')
    if Z.shape[1] != j_star.ambient_dim:
        raise DimensionMismatchError('pi_O', j_star.ambient_dim, Z.shape[1])
    if j_star.is_zero:
        return Subspace.zero(Z.shape[0], tol)
    return image(Z @ j_star.basis, tol, scale=spectral_norm(Z))


def excluded_set(Z, j_star: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Z^{-1} Π_O(Z): directions v for which no admissible ξ_Z exists."""
    return preimage(Z, pi_O(Z, j_star, tol), tol)


def _pinned_search_space(data: Dataset, j_star: Subspace, pinned: Iterable[str],
                         tol: Tolerance) -> Subspace:
    search = complement(j_star)
    for name in pinned:
        Z = data.block(name)
        search = preimage_within(search, Z, Subspace.zero(Z.shape[0], tol), tol)
    return search


def direction_margins(data: Dataset, j_star: Subspace, v, tol: Tolerance = DEFAULT_TOL,
                      pinned: Iterable[str] = ()) -> Dict[str, float]:
    """Distance of the unit vector v to Z^{-1} Π_O(Z) for every transformed block Z."""
    v = as_vector(v, 'v')
    v = v / np.linalg.norm(v)
    pinned = set(pinned)
    return {
        name: excluded_set(data.block(name), j_star, tol).residual(v)
        for name in BLOCK_NAMES if name not in pinned
    }


def choose_direction(data: Dataset, j_star: Subspace, tol: Tolerance = DEFAULT_TOL,
                     seed: Optional[int] = None, pinned: Iterable[str] = (),
                     retries: int = DEFAULT_RETRIES,
                     margin_factor: float = DEFAULT_MARGIN_FACTOR) -> np.ndarray:
    """
    Seeded random unit v ∈ J*(D)^⊥ (∩ ker Z for pinned blocks) whose distance
    to every Z^{-1} Π_O(Z) exceeds margin_factor * tol.

    Raises:
        DirectionExhaustedError: no candidate passed within ``retries`` draws
    """
    pinned = tuple(pinned)
    search = _pinned_search_space(data, j_star, pinned, tol)
    if search.is_zero:
        raise DirectionExhaustedError(0, pinned[-1] if pinned else None)

    excluded = {
        name: excluded_set(data.block(name), j_star, tol)
        for name in BLOCK_NAMES if name not in pinned
    }
    margin = margin_factor * tol.rel
    rng = np.random.default_rng(seed)
    rejections = {name: 0 for name in excluded}

    for attempt in range(1, retries + 1):
        v = search.basis @ rng.standard_normal(search.dim)
        v /= np.linalg.norm(v)
        margins = {name: S.residual(v) for name, S in excluded.items()}
        rejected = [name for name, value in margins.items() if value <= margin]
        if not rejected:
            logger.info(
                f"Attack direction found on attempt {attempt}: "
                + ', '.join(f"{name} margin {value:.3e}" for name, value in margins.items())
            )
            return v
        for name in rejected:
            rejections[name] += 1

    worst = max(rejections, key=rejections.get) if rejections else None
    raise DirectionExhaustedError(retries, worst)


def _admissible(data: Dataset, j_star: Subspace, v: np.ndarray, pinned: Tuple[str, ...],
                tol: Tolerance, margin_factor: float) -> List[str]:
    """Reasons a given direction is not admissible; empty when it is."""
    rejected = []
    if _pinned_search_space(data, j_star, pinned, tol).residual(v) > tol.residual:
        rejected.append('search_space')
    margins = direction_margins(data, j_star, v, tol, pinned)
    rejected.extend(name for name, value in margins.items() if value <= margin_factor * tol.rel)
    return rejected


def check_feasibility(data: Dataset, j_star: Subspace, tol: Tolerance = DEFAULT_TOL,
                      seed: Optional[int] = None, pinned: Iterable[str] = (),
                      retries: int = DEFAULT_RETRIES,
                      margin_factor: float = DEFAULT_MARGIN_FACTOR,
                      search: bool = True, direction=None) -> FeasibilityVerdict:
    """
    Evaluate dim Π_O(Z) < rank Z for every block and search for a common v.

    Args:
        data: Trajectory data
        j_star: J*(D)
        tol: Tolerance regime
        seed: Seed of the direction search
        pinned: Blocks left untransformed (zero targets)
        retries: Direction search budget
        margin_factor: Non-membership margin in units of tol
        search: Skip the direction search when False
        direction: Check this v instead of searching; it must lie in J*(D)^⊥
            (and in ker Z for pinned blocks) and clear every excluded set

    Returns:
        FeasibilityVerdict; common_v_exists is only true when a direction was found or accepted
    """
    pinned = set(pinned)
    blocks = {}
    for name in BLOCK_NAMES:
        Z = data.block(name)
        blocks[name] = BlockFeasibility(
            block=name,
            dim_pi=pi_O(Z, j_star, tol).dim,
            rank_z=numerical_rank(Z, tol),
            pinned=name in pinned,
        )
    verdict = FeasibilityVerdict(blocks=blocks)
    if not verdict.dimensional_ok:
        return verdict
    if direction is not None:
        v = as_vector(direction, 'direction')
        if v.shape[0] != data.T:
            raise DimensionMismatchError('check_feasibility.direction', data.T, v.shape[0])
        v = v / np.linalg.norm(v)
        verdict.rejected = _admissible(data, j_star, v, tuple(sorted(pinned)), tol, margin_factor)
        if verdict.rejected:
            logger.info(f"Given direction rejected by: {', '.join(verdict.rejected)}")
        else:
            verdict.direction = v
            verdict.common_v_exists = True
    elif search:
        try:
            verdict.direction = choose_direction(data, j_star, tol, seed, tuple(sorted(pinned)),
                                                 retries, margin_factor)
            verdict.common_v_exists = True
        except DirectionExhaustedError as exc:
            logger.info(f"Feasibility search failed: {exc}")
    return verdict


def rank_one_map(Z, v, z_tar, xi, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """
    Φ_Z = I + (z_tar - Z v) ξᵀ.

    Raises:
        RankOneConditionError: ξᵀ Z v ≠ 1 or ξᵀ z_tar = 0
    """
    Z = as_matrix(Z, 'Z')
    v, z_tar, xi = as_vector(v, 'v'), as_vector(z_tar, 'z_tar'), as_vector(xi, 'xi')
    if v.shape[0] != Z.shape[1] or z_tar.shape[0] != Z.shape[0] or xi.shape[0] != Z.shape[0]:
        raise DimensionMismatchError('rank_one_map', Z.shape, (v.shape[0], z_tar.shape[0], xi.shape[0]))
    Zv = Z @ v
    pivot = float(xi @ Zv)
    if abs(pivot - 1.0) > tol.residual:
        raise RankOneConditionError('xi_T_Zv == 1', pivot)
    gain = float(xi @ z_tar)
    if abs(gain) <= tol.rel:
        raise RankOneConditionError('xi_T_z_tar != 0', gain)
    return np.eye(Z.shape[0]) + np.outer(z_tar - Zv, xi)


def build_targets(spec: AttackSpec, sys: SystemModel) -> Tuple[np.ndarray, np.ndarray]:
    """x̃_1 = λ̃ x̃_0 + B ũ_0 and ỹ_0 = D ũ_0."""
    x1 = spec.lambda_tilde * spec.x0_tilde + sys.B @ spec.u0_tilde
    y0 = sys.D @ spec.u0_tilde
    return x1, y0


def _balanced_normal(a: np.ndarray, b: np.ndarray, pi: Subspace, tol: Tolerance):
    best, best_score = None, 0.0
    for candidate in (a + b, a - b, a, b):
        u = candidate - pi.project(candidate)
        u_norm = np.linalg.norm(u)
        if u_norm <= tol.residual:
            continue
        u = u / u_norm
        score = min(abs(u @ a), abs(u @ b))
        if score > best_score:
            best, best_score = u, score
    return best, best_score


def normal_vector(Z, v, z_tar, pi: Subspace, tol: Tolerance = DEFAULT_TOL,
                  block: str = 'Z') -> np.ndarray:
    """
    ξ_Z = u_Z / (u_Zᵀ Z v) for u_Z ⊥ Π_O(Z).

    u_Z is the orthonormal basis vector of Π_O(Z)^⊥ with the largest |u_Zᵀ Z v|.
    When that choice leaves ξ_Zᵀ z_tar at or below tol, the components of
    ẑ_v + ẑ_tar, ẑ_v - ẑ_tar, ẑ_v and ẑ_tar orthogonal to Π_O(Z) are tried and
    the one with the largest smaller pivot min(|u·ẑ_v|, |u·ẑ_tar|) wins.

    Raises:
        PivotTooSmallError: every candidate leaves a pivot at or below tol
    """
    Z = as_matrix(Z, 'Z')
    Zv = Z @ as_vector(v, 'v')
    z_tar = as_vector(z_tar, 'z_tar')
    zv_norm, tar_norm = np.linalg.norm(Zv), np.linalg.norm(z_tar)
    if zv_norm <= tol.rel or tar_norm <= tol.rel:
        raise PivotTooSmallError(block)
    a, b = Zv / zv_norm, z_tar / tar_norm

    normals = complement(pi).basis
    if normals.shape[1]:
        u = normals[:, int(np.argmax(np.abs(normals.T @ a)))]
        if abs(u @ a) > tol.residual and abs(u @ b) > tol.residual:
            logger.debug(f"Block {block}: basis normal vector, pivot {abs(u @ a):.3e}")
            return u / float(u @ Zv)

    best, best_score = _balanced_normal(a, b, pi, tol)
    if best is None or best_score <= tol.residual:
        raise PivotTooSmallError(block)
    logger.debug(f"Block {block}: balanced normal vector, pivot {best_score:.3e}")
    return best / float(best @ Zv)


def zero_target_blocks(targets: Dict[str, np.ndarray], spec: AttackSpec,
                       tol: Tolerance = DEFAULT_TOL) -> Tuple[str, ...]:
    scale = max(1.0, float(np.linalg.norm(spec.x0_tilde)))
    return tuple(name for name in BLOCK_NAMES if np.linalg.norm(targets[name]) <= tol.rel * scale)


def run_attack(data: Dataset, sys: SystemModel, ann: Annihilator, spec: AttackSpec,
               tol: Tolerance = DEFAULT_TOL, seed: Optional[int] = None,
               direction=None, retries: int = DEFAULT_RETRIES,
               margin_factor: float = DEFAULT_MARGIN_FACTOR) -> AttackResult:
    """
    Synthesize the block transformation and the attacked data.

    Args:
        data: Trajectory data
        sys: Known structure matrices
        ann: Noise annihilator
        spec: Injected eigenpair and input direction
        tol: Tolerance regime
        seed: Seed of the direction search
        direction: Use this v instead of searching; it passes the same admissibility checks
        retries: Direction search budget
        margin_factor: Non-membership margin in units of tol

    Returns:
        AttackResult with Φ_a, D̃, v and the block targets

    Raises:
        AttackSpecError, DimensionalConditionError, UnobservableTargetError,
        DirectionExhaustedError, PivotTooSmallError
    """
    spec.validate(sys, tol)
    params = compute_pqr(data, sys, ann)
    j_star = max_coeff_space(params, sys, tol)

    x1, y0 = build_targets(spec, sys)
    targets = {'X_minus': spec.x0_tilde, 'X_plus': x1, 'U_minus': spec.u0_tilde, 'Y_minus': y0}
    pinned = zero_target_blocks(targets, spec, tol)
    if pinned:
        logger.info(f"Zero targets pin block(s) {', '.join(pinned)} to the identity")

    verdict = check_feasibility(data, j_star, tol, pinned=pinned, search=False)
    if verdict.failing_blocks:
        raise DimensionalConditionError(verdict.failing_blocks)

    images = {name: pi_O(data.block(name), j_star, tol) for name in BLOCK_NAMES if name not in pinned}
    for name, pi in images.items():
        z = targets[name] / np.linalg.norm(targets[name])
        residual = pi.residual(z)
        if residual <= tol.residual:
            raise UnobservableTargetError(name, residual)

    if direction is None:
        v = choose_direction(data, j_star, tol, seed, pinned, retries, margin_factor)
    else:
        given = check_feasibility(data, j_star, tol, pinned=pinned, margin_factor=margin_factor,
                                  direction=direction)
        if not given.common_v_exists:
            raise DirectionExhaustedError(1, given.rejected[0])
        v = given.direction

    phis, xis = {}, {}
    for name in BLOCK_NAMES:
        Z = data.block(name)
        if name in pinned:
            phis[name] = np.eye(Z.shape[0])
            continue
        xi = normal_vector(Z, v, targets[name], images[name], tol, block=name)
        phis[name] = rank_one_map(Z, v, targets[name], xi, tol)
        xis[name] = xi

    transform = BlockTransform(
        phi_x_minus=phis['X_minus'],
        phi_x_plus=phis['X_plus'],
        phi_u=phis['U_minus'],
        phi_y=phis['Y_minus'],
    )
    attacked = transform.apply(data)
    logger.info(
        f"Attack synthesized: lambda {spec.lambda_tilde:.6g}, dim J* {j_star.dim}, "
        f"||Delta||_F {np.linalg.norm(attacked.stacked() - data.stacked()):.3e}"
    )
    return AttackResult(
        spec=spec,
        transform=transform,
        original=data,
        attacked=attacked,
        v=v,
        x1_tilde=x1,
        y0_tilde=y0,
        j_star=j_star,
        pinned=pinned,
        xi=xis,
    )


def stealth_residual(data: Dataset, attacked: Dataset, j_star: Subspace) -> float:
    """Largest relative change of D w over a basis of J*(D)."""
    if j_star.is_zero:
        return 0.0
    worst = 0.0
    for name in BLOCK_NAMES:
        Z = data.block(name)
        change = np.linalg.norm((attacked.block(name) - Z) @ j_star.basis)
        worst = max(worst, float(change) / max(1.0, spectral_norm(Z)))
    return worst


def verify_theorem1(data: Dataset, attacked: Dataset, sys: SystemModel, ann: Annihilator,
                    v, spec: AttackSpec, tol: Tolerance = DEFAULT_TOL) -> AttackVerificationReport:
    """
    Check the three conclusions for an attacked dataset:

    (i)   J*(D) ⊕ span{v} ⊆ J*(D̃)
    (ii)  A* = A_0 + w x̃_0ᵀ / ||x̃_0||², w = (λ̃ I - A_0) x̃_0, lies in Σ(D̃)
          with A* x̃_0 = λ̃ x̃_0
    (iii) D̃ is not informative for strong observability
    """
    v = as_vector(v, 'v')
    v = v / np.linalg.norm(v)
    failures = []

    j_before = max_coeff_space(compute_pqr(data, sys, ann), sys, tol)
    params_after = compute_pqr(attacked, sys, ann)
    j_after = max_coeff_space(params_after, sys, tol)

    v_orth = float(np.linalg.norm(j_before.project(v))) if j_before.dim else 0.0
    combined = subspace_sum(j_before, Subspace.span(v, tol))
    inclusion_residual = j_after.residual(combined.basis)
    inclusion_ok = v_orth <= tol.residual and contains(j_after, combined)
    if not inclusion_ok:
        failures.append(
            f"coefficient space inclusion: residual {inclusion_residual:.3e}, v component in J* {v_orth:.3e}"
        )

    x0 = spec.x0_tilde
    A0 = sigma_representative(params_after, tol)
    eigen_residual = member_residual = None
    eigen_ok = member_ok = False
    if A0 is None:
        failures.append("attacked model set is empty")
    else:
        w = (spec.lambda_tilde * np.eye(sys.n) - A0) @ x0
        A_mal = A0 + np.outer(w, x0) / float(x0 @ x0)
        eigen_residual = float(np.linalg.norm(A_mal @ x0 - spec.lambda_tilde * x0))
        eigen_ok = eigen_residual <= 10.0 * tol.rel * float(np.linalg.norm(x0))
        member_residual = sigma_residual(A_mal, params_after) / max(1.0, float(np.linalg.norm(params_after.R)))
        member_ok = sigma_contains(A_mal, params_after, tol)
        if not eigen_ok:
            failures.append(f"malicious eigenpair: residual {eigen_residual:.3e}")
        if not member_ok:
            failures.append(f"malicious model outside attacked model set: residual {member_residual:.3e}")

    report_after = is_informative_SO(attacked, sys, ann, tol)
    not_informative = not report_after.informative
    if not not_informative:
        failures.append("attacked data are still informative")

    report = AttackVerificationReport(
        dim_j_star_before=j_before.dim,
        dim_j_star_after=j_after.dim,
        v_orthogonality=v_orth,
        inclusion_residual=inclusion_residual,
        inclusion_ok=inclusion_ok,
        sigma_nonempty=A0 is not None,
        eigen_residual=eigen_residual,
        eigen_ok=eigen_ok,
        sigma_member_residual=member_residual,
        sigma_member_ok=member_ok,
        not_informative=not_informative,
        witness=report_after.witness,
        stealth_residual=stealth_residual(data, attacked, j_before),
        failures=failures,
    )
    if report.passed:
        logger.info(f"Attack verified: dim J* {j_before.dim} -> {j_after.dim}")
    else:
        logger.warning(f"Attack verification failed: {'; '.join(failures)}")
    return report
