"""
Infoattack Custom Exceptions

Every exception carries an ``exit_code`` used by the command-line front end.
"""


class InfoAttackError(Exception):
    """Base exception for all toolkit errors."""
    exit_code = 1


class DimensionMismatchError(InfoAttackError, ValueError):
    """
    Raised when two operands do not have compatible shapes.
    """
    exit_code = 2

    def __init__(self, operation, expected, actual, message=None):
        self.operation = operation
        self.expected = expected
        self.actual = actual
        if message is None:
            message = f"{operation}: expected {expected}, got {actual}"
        super().__init__(message)


class NonFiniteMatrixError(InfoAttackError, ValueError):
    """Raised when a matrix contains NaN or infinite entries."""
    exit_code = 2

    def __init__(self, name, message=None):
        self.name = name
        if message is None:
            message = f"Matrix '{name}' contains non-finite entries"
        super().__init__(message)


class ConfigSchemaError(InfoAttackError, ValueError):
    """Raised when a configuration file or value violates its schema."""
    exit_code = 2

    def __init__(self, source, detail):
        self.source = source
        self.detail = detail
        super().__init__(f"Invalid configuration in {source}: {detail}")


class AttackSpecError(InfoAttackError, ValueError):
    """Raised when an attack spec violates its invariants (x0 = 0 or C x0 != 0)."""
    exit_code = 2


class EmptyModelSetError(InfoAttackError):
    """Raised when the data admit no consistent state matrix."""
    exit_code = 2

    def __init__(self, residual, message=None):
        self.residual = residual
        if message is None:
            message = f"Model set is empty: best least-squares residual {residual:.3e}"
        super().__init__(message)


class UnsupportedHypothesisError(InfoAttackError):
    """Raised when a result is requested outside the hypothesis it was proven under."""
    exit_code = 2


class InfeasibleExcitationOrderError(InfoAttackError, ValueError):
    """Raised when a persistently exciting input of the requested order cannot exist."""
    exit_code = 2

    def __init__(self, order, m, T):
        self.order = order
        self.m = m
        self.T = T
        super().__init__(
            f"Excitation order {order} with {m} input(s) needs order*m <= T - order + 1, "
            f"got {order * m} > {T - order + 1}"
        )


class RankOneConditionError(InfoAttackError):
    """
    Raised when a rank-one block map cannot be built.
    ``condition`` is either 'xi_T_Zv == 1' or 'xi_T_z_tar != 0'.
    """
    exit_code = 1

    def __init__(self, condition, value):
        self.condition = condition
        self.value = value
        super().__init__(f"Rank-one map precondition '{condition}' violated (value {value:.3e})")


class DimensionalConditionError(InfoAttackError):
    """Raised when dim Pi_O(Z) < rank Z fails for a block that must be transformed."""
    exit_code = 4

    def __init__(self, blocks):
        self.blocks = list(blocks)
        super().__init__(
            f"Dimensional feasibility condition fails for block(s): {', '.join(self.blocks)}"
        )


class UnobservableTargetError(InfoAttackError):
    """Raised when a nonzero target vector lies inside Pi_O(Z)."""
    exit_code = 5

    def __init__(self, block, residual):
        self.block = block
        self.residual = residual
        super().__init__(
            f"Target for block {block} lies in the image of the weakly unobservable "
            f"coefficient space (off-subspace residual {residual:.3e})"
        )


class DirectionExhaustedError(InfoAttackError):
    """Raised when no admissible attack direction was found within the retry budget."""
    exit_code = 6

    def __init__(self, attempts, worst_block=None):
        self.attempts = attempts
        self.worst_block = worst_block
        message = f"No admissible attack direction after {attempts} attempt(s)"
        if worst_block:
            message += f" (block {worst_block} rejected every candidate)"
        super().__init__(message)


class PivotTooSmallError(InfoAttackError):
    """Raised when every candidate normal vector gives a vanishing pivot."""
    exit_code = 6

    def __init__(self, block):
        self.block = block
        super().__init__(f"No normal vector with a usable pivot for block {block}")


class VerificationFailedError(InfoAttackError):
    """Raised when the post-attack verification report does not pass."""
    exit_code = 7

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("Attack verification failed: " + "; ".join(self.failures))


class EmptyFeasibleSpaceError(InfoAttackError):
    """Raised when the feasible direction space of the min-norm problem is {0}."""
    exit_code = 8


class ExcludedDirectionError(InfoAttackError):
    """Raised when a direction has (numerically) no component in S_+."""
    exit_code = 8

    def __init__(self, projection_norm):
        self.projection_norm = projection_norm
        super().__init__(
            f"Direction lies in the excluded set (projection norm {projection_norm:.3e})"
        )


class NoFeasibleStartError(InfoAttackError):
    """Raised when every multi-start of the alternating solver failed."""
    exit_code = 8

    def __init__(self, starts):
        self.starts = starts
        super().__init__(f"All {starts} multi-start(s) failed or hit the excluded set")


class BoundViolatedError(InfoAttackError):
    """Raised when the lower-bound audit on a min-norm attack fails."""
    exit_code = 9

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"Lower bound violated: ||Delta||_F = {lhs:.6e} < {rhs:.6e}")


class ZeroPerturbationError(InfoAttackError, ValueError):
    """Raised when contribution ratios are requested for a zero perturbation."""
    exit_code = 1
