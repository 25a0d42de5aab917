"""Exception hierarchy shared by every module of the package."""


class CgqfError(Exception):
    """Base class for all errors raised by :mod:`cgqf`."""


class InvalidInput(CgqfError, ValueError):
    """An argument violates a documented precondition."""


class NotHermitian(InvalidInput):
    def __init__(self, name, i, j, deviation):
        self.name, self.i, self.j, self.deviation = name, i, j, deviation
        super().__init__(
            f"matrix {name} is not Hermitian: entry ({i}, {j}) differs from the "
            f"conjugate of ({j}, {i}) by {deviation:.3e}"
        )


class NotPositiveDefinite(InvalidInput):
    """Cholesky pivot was not strictly positive (rank-deficient covariance)."""


class SingularForm(InvalidInput):
    """An eigenvalue of ``L A`` is numerically zero."""


class NoConvergence(CgqfError, ArithmeticError):
    """An iterative method ran out of sweeps / terms."""


class DegenerateSystem(CgqfError, ArithmeticError):
    """Every pole cancelled during simplification."""


class PoleHit(CgqfError, ZeroDivisionError):
    """A rational MGF was evaluated on (or too close to) one of its poles."""


class TargetUnreachable(CgqfError, ValueError):
    """No shape parameter up to ``m_max`` meets the requested MSE target."""


class CollisionAfterRationalize(CgqfError, ArithmeticError):
    """Two distinct poles (or zeros) became equal after rationalization."""


class TooLarge(CgqfError, ValueError):
    """The combinatorial residue formula would enumerate too many terms."""


class PrecisionLoss(CgqfError, ArithmeticError):
    """Cancellation in an extended-precision sum exceeded the working precision."""


class DomainError(CgqfError, ValueError):
    """Special function called outside its domain."""


class InvalidK(InvalidInput):
    """A Rician factor is negative (or zero under the paper-literal covariance)."""


class UnsupportedM(InvalidInput):
    """QAM order outside {4, 16, 64, 256}."""


class ParseError(CgqfError, ValueError):
    """Malformed scenario file."""
