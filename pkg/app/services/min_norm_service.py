"""
Min-Norm Service - near-minimal perturbations of X_+ that break informativity

The perturbation is confined to X_+ (Δ_{X_-} = 0, Δ_{U_-} = 0, Δ_{Y_-} = 0):

    Δ_{X_+} = (x̃_1 - X_+ v) ξᵀ X_+,   x̃_1 = λ X_- v + B U_- v,

and its Frobenius norm factors as

    ||Δ_{X_+}||_F² = ||(λ X_- - X_+ + B U_-) v||² / ||proj_{S_+}(v)||²,

minimized over real λ and v ∈ K = J*(D)^⊥ ∩ ker(C X_-) by alternating exact
coordinate steps.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from app.core.exceptions import (
    DimensionalConditionError, DimensionMismatchError, EmptyFeasibleSpaceError, ExcludedDirectionError,
    NoFeasibleStartError, ZeroPerturbationError,
)
from app.core.subspace import (
    DEFAULT_TOL, Subspace, Tolerance, as_vector, complement, image, intersect, numerical_rank,
    preimage, preimage_within,
)
from app.models.model_set import Annihilator, Dataset, SystemModel, compute_pqr, sigma_representative
from app.services.attack_service import AttackSpec, BlockTransform, pi_O
from app.services.informativity_service import max_coeff_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiStartConfig:
    max_iter: int = 200
    rel_decrease: float = 1e-10
    grid_points: int = 16
    margin_factor: float = 100.0
    restarts: int = 2
    restart_step: float = 1e-2
    extra_lambdas: Sequence[float] = ()

    @classmethod
    def from_config(cls, config) -> 'MultiStartConfig':
        return cls(
            max_iter=config.MINNORM_MAX_ITER,
            rel_decrease=config.MINNORM_REL_DECREASE,
            grid_points=config.MINNORM_GRID_POINTS,
            margin_factor=config.DIRECTION_MARGIN_FACTOR,
        )


@dataclass(eq=False)
class MinNormProblem:
    """Feasible direction space K, S_+ and the excluded set for one dataset."""
    data: Dataset
    sys: SystemModel
    ann: Annihilator
    j_star: Subspace
    K: Subspace
    S_plus: Subspace
    excluded: Subspace
    tol: Tolerance = DEFAULT_TOL

    @property
    def input_drift(self) -> np.ndarray:
        """B U_-."""
        return self.sys.B @ self.data.U_minus

    def pencil(self, lam: float) -> np.ndarray:
        """M(λ) = λ X_- - X_+ + B U_-."""
        return lam * self.data.X_minus - self.data.X_plus + self.input_drift

    def s_plus_consistent(self) -> bool:
        """Both constructions of S_+ span the same subspace."""
        alt = intersect(complement(self.j_star), image(self.data.X_plus.T, self.tol))
        return alt.equals(self.S_plus)


@dataclass
class MinNormSolution:
    lambda_star: float
    v_star: np.ndarray
    zeta_star: np.ndarray
    xi_star: np.ndarray
    x0_tilde: np.ndarray
    u0_tilde: np.ndarray
    x1_tilde: np.ndarray
    delta_X_plus: np.ndarray
    phi_x_plus: np.ndarray
    objective_value: float
    frob_norm: float
    relative_error: float
    rho: np.ndarray
    iterations: int = 0
    start_lambda: float = 0.0
    history: List[float] = field(default_factory=list)
    theorem2_lower_bound: Optional[float] = None

    def attack_spec(self) -> AttackSpec:
        """Eigenpair (λ*, X_- v*) and input direction U_- v* carried by the attack."""
        return AttackSpec(lambda_tilde=self.lambda_star, x0_tilde=self.x0_tilde, u0_tilde=self.u0_tilde)

    def transform(self, sys: SystemModel) -> BlockTransform:
        identity = BlockTransform.identity(sys.n, sys.m, sys.p)
        return BlockTransform(
            phi_x_minus=identity.phi_x_minus,
            phi_x_plus=self.phi_x_plus,
            phi_u=identity.phi_u,
            phi_y=identity.phi_y,
        )

    def attacked(self, data: Dataset) -> Dataset:
        return data.replace(X_plus=data.X_plus + self.delta_X_plus)

    def to_dict(self) -> Dict:
        return {
            'lambda_star': self.lambda_star,
            'v_star': self.v_star.tolist(),
            'x0_tilde': self.x0_tilde.tolist(),
            'objective_value': self.objective_value,
            'frob_norm': self.frob_norm,
            'relative_error': self.relative_error,
            'rho': self.rho.tolist(),
            'iterations': self.iterations,
            'start_lambda': self.start_lambda,
            'theorem2_lower_bound': self.theorem2_lower_bound,
        }


def build_problem(data: Dataset, sys: SystemModel, ann: Annihilator,
                  tol: Tolerance = DEFAULT_TOL) -> MinNormProblem:
    """
    Assemble K, S_+ and X_+^{-1} Π_O(X_+).

    With a noise annihilator the feasible space is additionally restricted to
    ker(N (Y_- - C X_- - D U_-)) so that Y_- stays consistent after the attack.

    Raises:
        DimensionalConditionError: dim Π_O(X_+) >= rank X_+
        EmptyFeasibleSpaceError: K = {0}
    """
    params = compute_pqr(data, sys, ann)
    j_star = max_coeff_space(params, sys, tol)

    pi_plus = pi_O(data.X_plus, j_star, tol)
    if pi_plus.dim >= numerical_rank(data.X_plus, tol):
        raise DimensionalConditionError(['X_plus'])

    K = preimage_within(complement(j_star), sys.C @ data.X_minus, Subspace.zero(sys.p, tol), tol)
    if not ann.noise_free and ann.rows:
        residual = ann.N @ (data.Y_minus - sys.C @ data.X_minus - sys.D @ data.U_minus)
        K = preimage_within(K, residual, Subspace.zero(residual.shape[0], tol), tol)
    if K.is_zero:
        raise EmptyFeasibleSpaceError("Feasible direction space J*(D)^⊥ ∩ ker(C X_-) is {0}")

    excluded = preimage(data.X_plus, pi_plus, tol)
    S_plus = complement(excluded)
    logger.info(f"Min-norm problem: dim J* {j_star.dim}, dim K {K.dim}, dim S_+ {S_plus.dim}")
    return MinNormProblem(data=data, sys=sys, ann=ann, j_star=j_star, K=K,
                          S_plus=S_plus, excluded=excluded, tol=tol)


def _projection(v: np.ndarray, prob: MinNormProblem) -> np.ndarray:
    pv = prob.S_plus.project(v)
    norm = float(np.linalg.norm(pv))
    if norm <= prob.tol.residual * float(np.linalg.norm(v)):
        raise ExcludedDirectionError(norm)
    return pv


def zeta_closed_form(v, prob: MinNormProblem, tol: Optional[Tolerance] = None):
    """
    ζ* = proj_{S_+}(v) / ||proj_{S_+}(v)||² and the minimum-norm ξ with X_+ᵀ ξ = ζ*.

    Returns:
        (zeta, xi)
    """
    v = as_vector(v, 'v')
    pv = _projection(v, prob)
    zeta = pv / float(pv @ pv)
    xi, *_ = np.linalg.lstsq(prob.data.X_plus.T, zeta, rcond=None)
    return zeta, xi


def objective(lam: float, v, prob: MinNormProblem) -> float:
    """||(λ X_- - X_+ + B U_-) v||² / ||proj_{S_+}(v)||²."""
    v = as_vector(v, 'v')
    pv = _projection(v, prob)
    r = prob.pencil(lam) @ v
    return float(r @ r) / float(pv @ pv)


def _lambda_step(v: np.ndarray, prob: MinNormProblem, current: float) -> float:
    a = prob.data.X_minus @ v
    b = (prob.data.X_plus - prob.input_drift) @ v
    denom = float(a @ a)
    if denom <= prob.tol.rel ** 2:
        return current
    return float(a @ b) / denom


def _v_step(lam: float, prob: MinNormProblem) -> Optional[np.ndarray]:
    """
    Exact minimizer of the Rayleigh quotient over K at fixed λ.

    Coordinates c of v = K c split into the range of H = Kᵀ Π_{S+} K (whitened)
    and its kernel; the kernel part is eliminated through a Schur complement of
    G = Kᵀ M(λ)ᵀ M(λ) K.
    """
    Kb = prob.K.basis
    MK = prob.pencil(lam) @ Kb
    SK = prob.S_plus.basis.T @ Kb
    G = MK.T @ MK
    H = SK.T @ SK
    e, V = np.linalg.eigh(H)
    if e.size == 0 or e[-1] <= 0:
        return None
    keep = e > prob.tol.residual * e[-1]
    Vr, Vn = V[:, keep], V[:, ~keep]
    W = Vr / np.sqrt(e[keep])

    G_rr = W.T @ G @ W
    if Vn.shape[1]:
        G_rn = W.T @ G @ Vn
        G_nn_pinv = np.linalg.pinv(Vn.T @ G @ Vn)
        reduced = G_rr - G_rn @ G_nn_pinv @ G_rn.T
    else:
        reduced = G_rr
    reduced = 0.5 * (reduced + reduced.T)
    _, Y = np.linalg.eigh(reduced)
    y = Y[:, 0]
    c = W @ y
    if Vn.shape[1]:
        c = c - Vn @ (G_nn_pinv @ (Vn.T @ G @ W @ y))
    v = Kb @ c
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else None


def _run_start(lam0: float, prob: MinNormProblem, config: MultiStartConfig):
    lam = float(lam0)
    v = _v_step(lam, prob)
    if v is None:
        return None
    current = objective(lam, v, prob)
    history = [current]
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        previous = current
        lam = _lambda_step(v, prob, lam)
        current = objective(lam, v, prob)
        history.append(current)
        candidate = _v_step(lam, prob)
        if candidate is not None:
            try:
                value = objective(lam, candidate, prob)
            except ExcludedDirectionError:
                value = np.inf
            if value <= current:
                v, current = candidate, value
                history.append(current)
        logger.debug(f"Alternating step {iterations}: lambda {lam:.6g}, objective {current:.6e}")
        if previous - current <= config.rel_decrease * max(previous, np.finfo(float).tiny):
            break
    return lam, v, history, iterations


def starting_lambdas(prob: MinNormProblem, config: MultiStartConfig) -> List[float]:
    """Real parts of the representative model's eigenvalues plus a symmetric grid."""
    params = compute_pqr(prob.data, prob.sys, prob.ann)
    A0 = sigma_representative(params, prob.tol)
    starts = [float(lam) for lam in config.extra_lambdas]
    radius = 1.0
    if A0 is not None:
        eigenvalues = np.linalg.eigvals(A0)
        starts.extend(float(x) for x in np.unique(np.round(eigenvalues.real, 12)))
        radius = max(radius, float(np.max(np.abs(eigenvalues))))
    if config.grid_points > 0:
        starts.extend(np.linspace(-2.0 * radius, 2.0 * radius, config.grid_points).tolist())
    return starts


def _attempt_start(lam0: float, prob: MinNormProblem, config: MultiStartConfig, margin: float):
    """Run one start, restarting from perturbed λ while it fails or ends next to the excluded set."""
    step = config.restart_step * max(1.0, abs(float(lam0)))
    for attempt in range(config.restarts + 1):
        lam_start = float(lam0) + attempt * step
        try:
            outcome = _run_start(lam_start, prob, config)
        except ExcludedDirectionError:
            outcome = None
        if outcome is None:
            logger.debug(f"Start lambda {lam_start:.4g} failed")
            continue
        lam, v, history, iterations = outcome
        projection = float(np.linalg.norm(prob.S_plus.project(v)))
        if projection <= margin:
            logger.debug(f"Start lambda {lam_start:.4g} ended next to the excluded set "
                         f"(projection {projection:.3e})")
            continue
        return lam, v, history, iterations, lam_start
    return None


def alternating_solve(prob: MinNormProblem, tol: Optional[Tolerance] = None,
                      config: Optional[MultiStartConfig] = None) -> MinNormSolution:
    """
    Multi-start alternating minimization over (λ, v).

    A start that fails or ends next to the excluded set is restarted from a
    perturbed λ up to ``config.restarts`` times.

    Args:
        prob: Problem from build_problem
        tol: Tolerance regime (defaults to the problem's)
        config: Iteration and multi-start settings

    Returns:
        MinNormSolution for the best start whose v* keeps a margin to the excluded set

    Raises:
        NoFeasibleStartError: every start and its restarts failed or ended next to the excluded set
    """
    tol = tol or prob.tol
    config = config or MultiStartConfig()
    starts = starting_lambdas(prob, config)
    margin = config.margin_factor * tol.rel

    best = None
    for lam0 in starts:
        outcome = _attempt_start(lam0, prob, config, margin)
        if outcome is not None and (best is None or outcome[2][-1] < best[2][-1]):
            best = outcome

    if best is None:
        raise NoFeasibleStartError(len(starts))
    lam, v, history, iterations, lam0 = best
    solution = assemble_solution(lam, v, prob)
    solution.iterations = iterations
    solution.start_lambda = float(lam0)
    solution.history = history
    logger.info(
        f"Min-norm attack: lambda* {lam:.6g}, ||Delta||_F {solution.frob_norm:.6e}, "
        f"relative error {solution.relative_error:.3e} ({len(starts)} starts)"
    )
    return solution


def assemble_solution(lam: float, v, prob: MinNormProblem) -> MinNormSolution:
    """
    Δ_{X_+}, Φ_+^X and the diagnostics for a given (λ, v).

    Raises:
        ExcludedDirectionError: v has no usable component in S_+
        ZeroPerturbationError: (λ, X_- v) already is an eigenpair of the data
    """
    data, sys = prob.data, prob.sys
    v = as_vector(v, 'v')
    v = v / np.linalg.norm(v)
    zeta, xi = zeta_closed_form(v, prob)
    x0 = data.X_minus @ v
    u0 = data.U_minus @ v
    x1 = lam * x0 + sys.B @ u0
    r = x1 - data.X_plus @ v
    delta = np.outer(r, xi @ data.X_plus)
    frob = float(np.linalg.norm(delta))
    return MinNormSolution(
        lambda_star=float(lam),
        v_star=v,
        zeta_star=zeta,
        xi_star=xi,
        x0_tilde=x0,
        u0_tilde=u0,
        x1_tilde=x1,
        delta_X_plus=delta,
        phi_x_plus=np.eye(sys.n) + np.outer(r, xi),
        objective_value=objective(lam, v, prob),
        frob_norm=frob,
        relative_error=frob / max(float(np.linalg.norm(data.X_plus)), np.finfo(float).tiny),
        rho=contribution_ratios(delta),
    )


def contribution_ratios(delta) -> np.ndarray:
    """
    Row shares ρ_i = ||e_iᵀ Δ||² / ||Δ||_F².

    Raises:
        ZeroPerturbationError: Δ = 0
    """
    delta = np.asarray(delta, dtype=float)
    rows = np.sum(delta ** 2, axis=1)
    total = float(np.sum(rows))
    if total <= 0.0:
        raise ZeroPerturbationError("Contribution ratios are undefined for a zero perturbation")
    return rows / total


def hop_distances(A, C) -> np.ndarray:
    """
    Shortest directed hop count from each state to a measured state.

    State j feeds state i when A[i, j] != 0; a state is measured when its
    column of C is nonzero. States with no path to a measured state get inf.
    """
    A = np.asarray(A, dtype=float)
    C = np.asarray(C, dtype=float)
    n = A.shape[0]
    measured = np.flatnonzero(np.any(C != 0.0, axis=0))
    if measured.size == 0:
        return np.full(n, np.inf)
    # reversed edges: a walk from a measured state in this graph traces a path into it
    reach = (A != 0.0) & ~np.eye(n, dtype=bool)
    dist = shortest_path(csr_matrix(reach.astype(float)), directed=True, unweighted=True, indices=measured)
    return np.min(np.atleast_2d(dist), axis=0)


def energy_by_hop(rho, hops) -> Dict[float, float]:
    """Sum of the contribution ratios grouped by hop distance."""
    rho = np.asarray(rho, dtype=float)
    hops = np.asarray(hops, dtype=float)
    if rho.shape != hops.shape:
        raise DimensionMismatchError('energy_by_hop', rho.shape, hops.shape)
    return {float(h): float(np.sum(rho[hops == h])) for h in np.unique(hops)}
