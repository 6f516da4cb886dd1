"""
Tolerance-aware subspace algebra.

Every subspace is carried as an orthonormal basis produced by an SVD, together
with the Tolerance that produced it. Rank decisions across the toolkit go
through ``numerical_rank`` so that one threshold rule applies everywhere:

    tau = rel * sigma_ref * max(rows, cols)   (relative mode)
    tau = rel                                 (absolute mode)

``sigma_ref`` is the largest singular value of the matrix under test unless
an explicit ``scale`` is passed. Projected matrices pass the scale of the
unprojected operand so that round-off left after a projection is not counted
as rank.

Usage Example:
    from app.core.subspace import image, kernel, intersect

    S = intersect(image(M1), kernel(M2))
    S.contains(other)
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.exceptions import DimensionMismatchError, NonFiniteMatrixError

logger = logging.getLogger(__name__)

RELATIVE = 'relative'
ABSOLUTE = 'absolute'

# containment residuals are compared against RESIDUAL_FACTOR * rel
RESIDUAL_FACTOR = 1000.0


@dataclass(frozen=True)
class Tolerance:
    """Rank and residual thresholds shared by every module."""
    rel: float = 1e-9
    mode: str = RELATIVE

    def __post_init__(self):
        if not (self.rel > 0 and np.isfinite(self.rel)):
            raise ValueError(f"Tolerance must be a positive real, got {self.rel}")
        if self.mode not in (RELATIVE, ABSOLUTE):
            raise ValueError(f"Unknown tolerance mode '{self.mode}'")

    @classmethod
    def from_config(cls, config, rel: Optional[float] = None) -> 'Tolerance':
        """Build the run tolerance from a Config class, optionally overriding rel."""
        return cls(rel=float(rel if rel is not None else config.TOL_REL),
                   mode=getattr(config, 'TOL_MODE', RELATIVE))

    def threshold(self, sigma_ref: float, shape) -> float:
        if self.mode == ABSOLUTE:
            return self.rel
        return self.rel * float(sigma_ref) * max(shape)

    @property
    def residual(self) -> float:
        """Absolute threshold for residuals of unit vectors (containment tests)."""
        if self.mode == ABSOLUTE:
            return self.rel
        return self.rel * RESIDUAL_FACTOR


DEFAULT_TOL = Tolerance()


def as_matrix(a, name: str = 'matrix') -> np.ndarray:
    """
    Convert input to a finite 2-D float array.

    A 1-D input is read as a column vector.

    Raises:
        DimensionMismatchError: input has more than two dimensions
        NonFiniteMatrixError: input contains NaN or inf
    """
    arr = np.array(a, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim > 2:
        raise DimensionMismatchError(name, '2-D array', f'{arr.ndim}-D array')
    if not np.all(np.isfinite(arr)):
        raise NonFiniteMatrixError(name)
    return arr


def as_vector(v, name: str = 'vector') -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteMatrixError(name)
    return arr


def spectral_norm(M) -> float:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL, scale: Optional[float] = None) -> int:
    """
    Count singular values of M above the tolerance threshold.

    Args:
        M: Matrix to test
        tol: Tolerance regime
        scale: Reference magnitude for relative mode (default: largest singular value of M)

    Returns:
        Numerical rank (0 for empty or zero matrices)
    """
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    ref = s[0] if scale is None else scale
    return int(np.sum(s > tol.threshold(ref, M.shape)))


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Linear subspace of R^k held as an orthonormal basis (k x d, d may be 0).
    """
    basis: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise DimensionMismatchError('Subspace', '2-D basis', f'{b.ndim}-D basis')
        if b.shape[1] > b.shape[0]:
            raise DimensionMismatchError('Subspace', f'at most {b.shape[0]} columns', b.shape[1])
        b.setflags(write=False)
        object.__setattr__(self, 'basis', b)

    @classmethod
    def zero(cls, ambient_dim: int, tol: Tolerance = DEFAULT_TOL) -> 'Subspace':
        return cls(np.zeros((ambient_dim, 0)), tol)

    @classmethod
    def full(cls, ambient_dim: int, tol: Tolerance = DEFAULT_TOL) -> 'Subspace':
        return cls(np.eye(ambient_dim), tol)

    @classmethod
    def span(cls, vectors, tol: Tolerance = DEFAULT_TOL) -> 'Subspace':
        """Subspace spanned by the columns of ``vectors``."""
        return image(vectors, tol)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def project(self, v) -> np.ndarray:
        return project(self, v)

    def residual(self, vectors) -> float:
        """Largest norm of the columns of ``vectors`` left after projecting onto self."""
        V = as_matrix(vectors, 'vectors')
        if V.shape[0] != self.ambient_dim:
            raise DimensionMismatchError('Subspace.residual', self.ambient_dim, V.shape[0])
        if V.shape[1] == 0:
            return 0.0
        R = V - self.basis @ (self.basis.T @ V)
        return float(np.max(np.linalg.norm(R, axis=0)))

    def orthonormality_error(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.basis.T @ self.basis - np.eye(self.dim))))

    def complement(self) -> 'Subspace':
        return complement(self)

    def intersect(self, other: 'Subspace') -> 'Subspace':
        return intersect(self, other)

    def sum(self, other: 'Subspace') -> 'Subspace':
        return subspace_sum(self, other)

    def contains(self, other: 'Subspace', atol: Optional[float] = None) -> bool:
        return contains(self, other, atol)

    def equals(self, other: 'Subspace', atol: Optional[float] = None) -> bool:
        """Same span, checked by mutual containment."""
        return (self.ambient_dim == other.ambient_dim
                and self.dim == other.dim
                and contains(self, other, atol)
                and contains(other, self, atol))

    def __repr__(self):
        return f'<Subspace dim={self.dim} of R^{self.ambient_dim}>'


def _check_ambient(operation: str, S1: Subspace, S2: Subspace):
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatchError(operation, S1.ambient_dim, S2.ambient_dim)


def image(M, tol: Tolerance = DEFAULT_TOL, scale: Optional[float] = None) -> Subspace:
    """Orthonormal basis of the column space of M."""
    M = as_matrix(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return Subspace.zero(rows, tol)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    ref = s[0] if scale is None else scale
    r = int(np.sum(s > tol.threshold(ref, M.shape)))
    return Subspace(U[:, :r].copy(), tol)


def kernel(M, tol: Tolerance = DEFAULT_TOL, scale: Optional[float] = None) -> Subspace:
    """Orthonormal basis of the null space of M."""
    M = as_matrix(M)
    rows, cols = M.shape
    if cols == 0:
        return Subspace.zero(0, tol)
    if rows == 0:
        return Subspace.full(cols, tol)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    ref = s[0] if scale is None else scale
    r = int(np.sum(s > tol.threshold(ref, M.shape)))
    return Subspace(Vh[r:].T.copy(), tol)


def intersect(S1: Subspace, S2: Subspace) -> Subspace:
    """
    Orthonormal basis of S1 ∩ S2.

    Computed as Basis(S1) · ker(Π_{S2⊥} · Basis(S1)); the singular values of
    the projected basis are the sines of the principal angles.
    """
    _check_ambient('intersect', S1, S2)
    tol = S1.tol
    if S1.is_zero or S2.is_zero:
        return Subspace.zero(S1.ambient_dim, tol)
    if S2.is_full:
        return S1
    W = S1.basis
    off = W - S2.basis @ (S2.basis.T @ W)
    coeffs = kernel(off, tol, scale=1.0)
    return Subspace(W @ coeffs.basis, tol)


def subspace_sum(S1: Subspace, S2: Subspace) -> Subspace:
    """S1 + S2 as the image of the concatenated bases."""
    _check_ambient('sum', S1, S2)
    return image(np.hstack([S1.basis, S2.basis]), S1.tol, scale=1.0)


def complement(S: Subspace) -> Subspace:
    """Orthogonal complement of S in its ambient space."""
    if S.is_zero:
        return Subspace.full(S.ambient_dim, S.tol)
    return kernel(S.basis.T, S.tol, scale=1.0)


def contains(S1: Subspace, S2: Subspace, atol: Optional[float] = None) -> bool:
    """True iff every basis vector of S2 lies in S1 up to the residual threshold."""
    _check_ambient('contains', S1, S2)
    if atol is None:
        atol = S1.tol.residual
    if S2.is_zero:
        return True
    return S1.residual(S2.basis) <= atol


def preimage(Z, S: Subspace, tol: Optional[Tolerance] = None) -> Subspace:
    """
    Set-theoretic preimage Z^{-1}S = {v : Zv ∈ S}, as ker(Π_{S⊥} Z).
    """
    tol = tol or S.tol
    Z = as_matrix(Z, 'Z')
    if Z.shape[0] != S.ambient_dim:
        raise DimensionMismatchError('preimage', S.ambient_dim, Z.shape[0])
    off = Z - S.basis @ (S.basis.T @ Z)
    return kernel(off, tol, scale=spectral_norm(Z))


def preimage_within(J: Subspace, Z, S: Subspace, tol: Optional[Tolerance] = None) -> Subspace:
    """
    J ∩ Z^{-1}S, computed inside J so the result stays orthonormal.
    """
    tol = tol or J.tol
    Z = as_matrix(Z, 'Z')
    if Z.shape[1] != J.ambient_dim:
        raise DimensionMismatchError('preimage_within', J.ambient_dim, Z.shape[1])
    if Z.shape[0] != S.ambient_dim:
        raise DimensionMismatchError('preimage_within', S.ambient_dim, Z.shape[0])
    if J.is_zero:
        return J
    ZJ = Z @ J.basis
    off = ZJ - S.basis @ (S.basis.T @ ZJ)
    coeffs = kernel(off, tol, scale=spectral_norm(Z))
    return Subspace(J.basis @ coeffs.basis, tol)


def project(S: Subspace, v) -> np.ndarray:
    """Orthogonal projection B·Bᵀ·v of a vector (or matrix of columns) onto S."""
    arr = np.asarray(v, dtype=float)
    if arr.shape[0] != S.ambient_dim:
        raise DimensionMismatchError('project', S.ambient_dim, arr.shape[0])
    return S.basis @ (S.basis.T @ arr)
