"""
System, dataset and affine model set Σ(D)

Holds the LTI system x_{k+1} = A x_k + B u_k + E w_k, y_k = C x_k + D u_k + F w_k,
the trajectory data D = (X_-, X_+, U_-, Y_-), the noise annihilator [M N] with
ker [M N] = im [E; F], and the (P, Q, R) parameterization

    Σ(D) = {A : R(D) = Q A P(D)},   P = X_-,  Q = M,
    R = M (X_+ - B U_-) + N (Y_- - C X_- - D U_-).

When E and F vanish the annihilator is normalized to M = I_n, N = 0, so that
Q acts as the identity on states.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from app.core.exceptions import DimensionMismatchError
from app.core.subspace import DEFAULT_TOL, Tolerance, as_matrix, complement, image, kernel

logger = logging.getLogger(__name__)

BLOCK_NAMES = ('X_minus', 'X_plus', 'U_minus', 'Y_minus')


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SystemModel:
    """
    Structure matrices (B, C, D, E, F) and, in simulation contexts, A_true.

    E (n x l) and F (p x l) may have l = 0 columns for noise-free systems.
    """
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    A_true: Optional[np.ndarray] = None

    def __post_init__(self):
        B = as_matrix(self.B, 'B')
        C = as_matrix(self.C, 'C')
        n, m = B.shape
        p = C.shape[0]
        if C.shape[1] != n:
            raise DimensionMismatchError('SystemModel.C', f'p x {n}', C.shape)
        D = as_matrix(self.D, 'D') if np.size(self.D) else np.zeros((p, m))
        if D.shape != (p, m):
            raise DimensionMismatchError('SystemModel.D', (p, m), D.shape)
        E = np.array(self.E, dtype=float)
        F = np.array(self.F, dtype=float)
        if E.size == 0 and F.size == 0:
            E, F = np.zeros((n, 0)), np.zeros((p, 0))
        else:
            E, F = as_matrix(E, 'E'), as_matrix(F, 'F')
        if E.shape[0] != n or F.shape[0] != p or E.shape[1] != F.shape[1]:
            raise DimensionMismatchError('SystemModel.E/F', f'({n} x l, {p} x l)', (E.shape, F.shape))
        for name, value in (('B', B), ('C', C), ('D', D), ('E', E), ('F', F)):
            object.__setattr__(self, name, _frozen(value))
        if self.A_true is not None:
            A = as_matrix(self.A_true, 'A')
            if A.shape != (n, n):
                raise DimensionMismatchError('SystemModel.A', (n, n), A.shape)
            object.__setattr__(self, 'A_true', _frozen(A))

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def l(self) -> int:
        return self.E.shape[1]

    def to_dict(self) -> Dict:
        return {
            'n': self.n, 'm': self.m, 'p': self.p, 'l': self.l,
            'A': None if self.A_true is None else self.A_true.tolist(),
            'B': self.B.tolist(), 'C': self.C.tolist(), 'D': self.D.tolist(),
            'E': self.E.tolist(), 'F': self.F.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'SystemModel':
        """
        Build a system from the JSON field layout n, m, p, l, A, B, C, D, E, F.

        Missing D, E, F default to zeros; declared dimensions are checked.
        """
        n, m, p = int(data['n']), int(data['m']), int(data['p'])
        l = int(data.get('l', 0))
        B = np.array(data['B'], dtype=float).reshape(n, m)
        C = np.array(data['C'], dtype=float).reshape(p, n)
        D = np.array(data['D'], dtype=float).reshape(p, m) if data.get('D') is not None else np.zeros((p, m))
        E = np.array(data['E'], dtype=float).reshape(n, l) if l and data.get('E') is not None else np.zeros((n, l))
        F = np.array(data['F'], dtype=float).reshape(p, l) if l and data.get('F') is not None else np.zeros((p, l))
        A = data.get('A')
        A = None if A is None else np.array(A, dtype=float).reshape(n, n)
        return cls(B=B, C=C, D=D, E=E, F=F, A_true=A)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Trajectory data (X_-, X_+, U_-, Y_-) sharing the horizon T."""
    X_minus: np.ndarray
    X_plus: np.ndarray
    U_minus: np.ndarray
    Y_minus: np.ndarray

    def __post_init__(self):
        blocks = {name: as_matrix(getattr(self, name), name) for name in BLOCK_NAMES}
        T = blocks['X_minus'].shape[1]
        if T < 1:
            raise DimensionMismatchError('Dataset', 'T >= 1', T)
        for name, value in blocks.items():
            if value.shape[1] != T:
                raise DimensionMismatchError(f'Dataset.{name}', f'{T} columns', value.shape[1])
        if blocks['X_plus'].shape[0] != blocks['X_minus'].shape[0]:
            raise DimensionMismatchError('Dataset.X_plus', blocks['X_minus'].shape[0], blocks['X_plus'].shape[0])
        for name, value in blocks.items():
            object.__setattr__(self, name, _frozen(value))

    @property
    def T(self) -> int:
        return self.X_minus.shape[1]

    @property
    def n(self) -> int:
        return self.X_minus.shape[0]

    @property
    def m(self) -> int:
        return self.U_minus.shape[0]

    @property
    def p(self) -> int:
        return self.Y_minus.shape[0]

    def block(self, name: str) -> np.ndarray:
        if name not in BLOCK_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def blocks(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in BLOCK_NAMES}

    def stacked(self) -> np.ndarray:
        """The stacked data matrix D = [X_-; X_+; U_-; Y_-]."""
        return np.vstack([self.X_minus, self.X_plus, self.U_minus, self.Y_minus])

    def replace(self, **blocks) -> 'Dataset':
        current = self.blocks()
        current.update(blocks)
        return Dataset(**current)

    def difference(self, other: 'Dataset') -> Dict[str, np.ndarray]:
        """Blockwise self - other."""
        return {name: getattr(self, name) - getattr(other, name) for name in BLOCK_NAMES}

    def check_system(self, sys: SystemModel):
        if (self.n, self.m, self.p) != (sys.n, sys.m, sys.p):
            raise DimensionMismatchError('Dataset vs SystemModel', (sys.n, sys.m, sys.p), (self.n, self.m, self.p))


@dataclass(frozen=True, eq=False)
class Annihilator:
    """Left factor [M N] whose kernel is the noise image im [E; F]."""
    M: np.ndarray
    N: np.ndarray
    noise_free: bool = False

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        N = np.array(self.N, dtype=float)
        if M.ndim != 2 or N.ndim != 2 or M.shape[0] != N.shape[0]:
            raise DimensionMismatchError('Annihilator', 'M, N with equal row counts', (M.shape, N.shape))
        object.__setattr__(self, 'M', _frozen(M))
        object.__setattr__(self, 'N', _frozen(N))

    @classmethod
    def noise_free_for(cls, n: int, p: int) -> 'Annihilator':
        """M = I_n, N = 0: the noise-free normalization."""
        return cls(M=np.eye(n), N=np.zeros((n, p)), noise_free=True)

    @property
    def rows(self) -> int:
        return self.M.shape[0]

    @property
    def stacked(self) -> np.ndarray:
        return np.hstack([self.M, self.N])

    def check(self, E, F, tol: Tolerance = DEFAULT_TOL) -> bool:
        """
        Verify ker [M N] = im [E; F] through the rank and product identities.

        The noise-free normalization is accepted for E = 0, F = 0 by definition.
        """
        EF = np.vstack([np.asarray(E, float), np.asarray(F, float)])
        if self.noise_free:
            return not np.any(EF)
        n_p = EF.shape[0]
        rank_ef = image(EF, tol).dim if EF.size else 0
        product = self.stacked @ EF if EF.size else np.zeros((self.rows, 0))
        rank_mn = image(self.stacked, tol).dim if self.rows else 0
        return rank_mn == n_p - rank_ef and np.allclose(product, 0.0, atol=tol.residual)


@dataclass(frozen=True, eq=False)
class AffineSetParams:
    """P (n x T), Q (l' x n), R (l' x T) with Σ(D) = {A : R = Q A P}."""
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def T(self) -> int:
        return self.P.shape[1]


def compute_annihilator(E, F, tol: Tolerance = DEFAULT_TOL) -> Annihilator:
    """
    Compute [M N] with orthonormal rows spanning im([E; F])^⊥.

    Args:
        E: n x l noise input matrix
        F: p x l noise feedthrough matrix
        tol: Tolerance regime

    Returns:
        Annihilator; M = I_n, N = 0 when E and F vanish
    """
    E = np.array(E, dtype=float)
    F = np.array(F, dtype=float)
    n, p = E.shape[0], F.shape[0]
    if E.ndim != 2 or F.ndim != 2 or E.shape[1] != F.shape[1]:
        raise DimensionMismatchError('compute_annihilator', 'E (n x l), F (p x l)', (E.shape, F.shape))
    if E.shape[1] == 0 or not (np.any(E) or np.any(F)):
        return Annihilator.noise_free_for(n, p)
    noise_image = image(np.vstack([E, F]), tol)
    rows = complement(noise_image).basis.T
    logger.debug(f"Annihilator: noise image dim {noise_image.dim}, {rows.shape[0]} annihilating rows")
    return Annihilator(M=rows[:, :n].copy(), N=rows[:, n:].copy())


def compute_pqr(data: Dataset, sys: SystemModel, ann: Annihilator) -> AffineSetParams:
    """
    Affine set parameters P = X_-, Q = M,
    R = M (X_+ - B U_-) + N (Y_- - C X_- - D U_-).
    """
    data.check_system(sys)
    if ann.M.shape[1] != sys.n or ann.N.shape[1] != sys.p:
        raise DimensionMismatchError('compute_pqr.annihilator', (sys.n, sys.p), (ann.M.shape[1], ann.N.shape[1]))
    state_part = data.X_plus - sys.B @ data.U_minus
    output_part = data.Y_minus - sys.C @ data.X_minus - sys.D @ data.U_minus
    R = ann.M @ state_part + ann.N @ output_part
    return AffineSetParams(P=data.X_minus.copy(), Q=ann.M.copy(), R=R)


def sigma_residual(A, params: AffineSetParams) -> float:
    """Frobenius residual ||R - Q A P||_F."""
    A = as_matrix(A, 'A')
    if A.shape != (params.n, params.n):
        raise DimensionMismatchError('sigma_residual', (params.n, params.n), A.shape)
    return float(np.linalg.norm(params.R - params.Q @ A @ params.P))


def sigma_contains(A, params: AffineSetParams, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ||R - QAP||_F <= tol * max(1, ||R||_F)."""
    return sigma_residual(A, params) <= tol.rel * max(1.0, float(np.linalg.norm(params.R)))


def _membership_operator(params: AffineSetParams) -> np.ndarray:
    # vec(Q A P) = (P^T ⊗ Q) vec(A), column-major vec
    return np.kron(params.P.T, params.Q)


def sigma_least_squares(params: AffineSetParams) -> np.ndarray:
    """Minimum-norm minimizer of ||R - Q A P||_F (a member of Σ(D) whenever Σ(D) is nonempty)."""
    n = params.n
    if params.Q.shape[0] == 0:
        return np.zeros((n, n))
    K = _membership_operator(params)
    rhs = params.R.reshape(-1, order='F')
    solution, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    return solution.reshape((n, n), order='F')


def sigma_representative(params: AffineSetParams, tol: Tolerance = DEFAULT_TOL) -> Optional[np.ndarray]:
    """
    Minimum-norm least-squares member A_0 of Σ(D).

    Returns:
        A_0, or None when the best residual exceeds the tolerance (Σ(D) empty)
    """
    A0 = sigma_least_squares(params)
    if not sigma_contains(A0, params, tol):
        logger.info(f"Model set empty: residual {sigma_residual(A0, params):.3e}")
        return None
    return A0


def sigma_direction_basis(params: AffineSetParams, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """
    Free directions of Σ(D): matrices ΔA with Q ΔA P = 0.

    Returns:
        Array of shape (k, n, n) with an orthonormal (Frobenius) basis; k = 0 for a singleton set
    """
    n = params.n
    if params.Q.shape[0] == 0:
        return np.eye(n * n).reshape(n * n, n, n)
    free = kernel(_membership_operator(params), tol)
    return np.stack([free.basis[:, j].reshape((n, n), order='F') for j in range(free.dim)]) \
        if free.dim else np.zeros((0, n, n))
