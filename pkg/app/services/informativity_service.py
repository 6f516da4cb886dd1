"""
Informativity Service - strong observability from finite data

Computes the maximum weakly unobservable coefficient space J*(D) ⊆ R^T, the
data-driven weakly unobservable subspace V*(D) = P J*(D), the model-level
weakly unobservable subspace V*(A, B, C, D), and the informativity verdict:

    D informative for strong observability
        <=>  C^{-1} im D ⊆ im P   and   J*(D) ⊆ ker P.

Both J*(D) and V*(A, B, C, D) are largest subspaces J with

    [top; bottom] J ⊆ (L J) × {0} + im [G; H]

(data level: top = R, bottom = C P, L = Q P, G = Q B, H = D; model level:
top = A, bottom = C, L = I, G = B, H = D). They are computed by the same
fixed-point iteration, starting from the whole space and shrinking until the
dimension stalls.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from app.core.exceptions import DimensionMismatchError
from app.core.subspace import (
    DEFAULT_TOL, Subspace, Tolerance, as_matrix, contains, image, kernel, preimage, preimage_within,
    spectral_norm,
)
from app.models.model_set import AffineSetParams, Annihilator, Dataset, SystemModel, compute_pqr

logger = logging.getLogger(__name__)


@dataclass
class InformativityReport:
    """Verdict of the strong-observability informativity test."""
    j_star: Subspace
    v_star_data: Subspace
    cond_image: bool
    cond_kernel: bool
    witness: Optional[np.ndarray] = None
    witness_norm: float = 0.0
    iterations: int = 0

    @property
    def informative(self) -> bool:
        return self.cond_image and self.cond_kernel

    def to_dict(self) -> Dict:
        return {
            'informative': self.informative,
            'cond_image': self.cond_image,
            'cond_kernel': self.cond_kernel,
            'T': self.j_star.ambient_dim,
            'n': self.v_star_data.ambient_dim,
            'dim_j_star': self.j_star.dim,
            'dim_v_star_data': self.v_star_data.dim,
            'isa_iterations': self.iterations,
            'witness': None if self.witness is None else self.witness.tolist(),
            'witness_P_norm': self.witness_norm,
        }


@dataclass
class FixedPointTrace:
    dims: List[int] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return max(len(self.dims) - 1, 0)


def largest_output_nulling(top, bottom, lift, G, H, tol: Tolerance = DEFAULT_TOL,
                           trace: Optional[FixedPointTrace] = None) -> Subspace:
    """
    Largest J ⊆ R^k with [top; bottom] J ⊆ (lift J) × {0} + im [G; H].

    Args:
        top: a x k matrix
        bottom: b x k matrix
        lift: a x k matrix applied to J on the right-hand side
        G: a x m matrix
        H: b x m matrix
        tol: Tolerance regime
        trace: optional recorder of the dimension sequence

    Returns:
        Subspace of R^k (at most k iterations of the shrinking recursion)
    """
    top, bottom, lift = as_matrix(top, 'top'), as_matrix(bottom, 'bottom'), as_matrix(lift, 'lift')
    G, H = as_matrix(G, 'G'), as_matrix(H, 'H')
    k = top.shape[1]
    a, b = top.shape[0], bottom.shape[0]
    if bottom.shape[1] != k or lift.shape != (a, k) or G.shape[0] != a or H.shape[0] != b:
        raise DimensionMismatchError('largest_output_nulling', f'consistent blocks with {k} columns',
                                     (top.shape, bottom.shape, lift.shape, G.shape, H.shape))
    left = np.vstack([top, bottom])
    feed = np.vstack([G, H])
    J = Subspace.full(k, tol)
    if trace is not None:
        trace.dims.append(J.dim)
    for _ in range(k + 1):
        lifted = np.vstack([lift @ J.basis, np.zeros((b, J.dim))])
        target = image(np.hstack([lifted, feed]), tol)
        J_next = preimage_within(J, left, target, tol)
        if trace is not None:
            trace.dims.append(J_next.dim)
        logger.debug(f"Output-nulling iteration: dim {J.dim} -> {J_next.dim}")
        if J_next.dim == J.dim:
            return J_next
        J = J_next
    return J


def coeff_space_residual(J: Subspace, params: AffineSetParams, sys: SystemModel,
                         tol: Tolerance = DEFAULT_TOL) -> float:
    """
    Fixed-point certificate: residual of [R; CP]·Basis(J) off (QP J × {0} + im [QB; D]).

    Residuals are reported relative to the scale of [R; CP].
    """
    left = np.vstack([params.R, sys.C @ params.P])
    scale = max(1.0, float(np.linalg.norm(left, 2)) if left.size else 1.0)
    if J.is_zero:
        return 0.0
    lifted = np.vstack([params.Q @ params.P @ J.basis, np.zeros((sys.p, J.dim))])
    feed = np.vstack([params.Q @ sys.B, sys.D])
    target = image(np.hstack([lifted, feed]), tol)
    return target.residual(left @ J.basis) / scale


def max_coeff_space(params: AffineSetParams, sys: SystemModel, tol: Tolerance = DEFAULT_TOL,
                    trace: Optional[FixedPointTrace] = None) -> Subspace:
    """
    Maximum weakly unobservable coefficient space J*(D) ⊆ R^T.
    """
    if params.P.shape[0] != sys.n or params.Q.shape[1] != sys.n:
        raise DimensionMismatchError('max_coeff_space', sys.n, (params.P.shape[0], params.Q.shape[1]))
    J = largest_output_nulling(
        top=params.R,
        bottom=sys.C @ params.P,
        lift=params.Q @ params.P,
        G=params.Q @ sys.B,
        H=sys.D,
        tol=tol,
        trace=trace,
    )
    residual = coeff_space_residual(J, params, sys, tol)
    if residual > tol.residual:
        logger.warning(f"Coefficient space certificate residual {residual:.3e} exceeds {tol.residual:.1e}")
    logger.debug(f"J*(D): dim {J.dim} of R^{params.T}, certificate residual {residual:.2e}")
    return J


def model_v_star(A, B, C, D, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """
    Weakly unobservable subspace V*(A, B, C, D): largest output-nulling
    controlled invariant subspace.
    """
    A, B, C, D = as_matrix(A, 'A'), as_matrix(B, 'B'), as_matrix(C, 'C'), as_matrix(D, 'D')
    n = A.shape[0]
    return largest_output_nulling(top=A, bottom=C, lift=np.eye(n), G=B, H=D, tol=tol)


def observability_kernel(A, C, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Unobservable subspace ker [C; CA; ...; CA^{n-1}] (brute-force oracle)."""
    A, C = as_matrix(A, 'A'), as_matrix(C, 'C')
    n = A.shape[0]
    rows, block = [], C
    for _ in range(n):
        rows.append(block)
        block = block @ A
    return kernel(np.vstack(rows), tol)


def is_informative_SO(data: Dataset, sys: SystemModel, ann: Annihilator,
                      tol: Tolerance = DEFAULT_TOL) -> InformativityReport:
    """
    Evaluate both informativity conditions on the data.

    Args:
        data: Trajectory data
        sys: Known structure matrices
        ann: Noise annihilator
        tol: Tolerance regime

    Returns:
        InformativityReport with J*(D), V*(D), both conditions and a witness
        coefficient vector when J*(D) ⊄ ker P
    """
    params = compute_pqr(data, sys, ann)
    trace = FixedPointTrace()
    J = max_coeff_space(params, sys, tol, trace=trace)
    P = params.P

    output_nulling_states = preimage(sys.C, image(sys.D, tol), tol)
    cond_image = contains(image(P, tol), output_nulling_states)

    v_star_data = image(P @ J.basis, tol, scale=spectral_norm(P)) if J.dim else Subspace.zero(sys.n, tol)
    cond_kernel = contains(kernel(P, tol), J)

    witness, witness_norm = None, 0.0
    if not cond_kernel:
        _, s, Vh = np.linalg.svd(P @ J.basis, full_matrices=False)
        witness = J.basis @ Vh[0]
        witness = witness / np.linalg.norm(witness)
        witness_norm = float(s[0])

    report = InformativityReport(
        j_star=J,
        v_star_data=v_star_data,
        cond_image=cond_image,
        cond_kernel=cond_kernel,
        witness=witness,
        witness_norm=witness_norm,
        iterations=trace.iterations,
    )
    logger.info(
        f"Informativity: dim J* = {J.dim}, dim V*(D) = {v_star_data.dim}, "
        f"image condition {cond_image}, kernel condition {cond_kernel}"
    )
    return report
