"""Exception types raised by the kernels and discretization methods."""


class SdeDiscError(Exception):
    """Base class for all library errors."""


class DimensionError(SdeDiscError, ValueError):
    """Matrix arguments have incompatible or invalid shapes."""


class NonFiniteError(SdeDiscError, ValueError):
    """Input contains NaN or Inf entries."""


class MatrixOverflowError(SdeDiscError, ArithmeticError):
    """A computation overflowed to Inf/NaN (e.g. exp of a huge matrix)."""


class ConvergenceError(SdeDiscError, RuntimeError):
    """An iterative kernel failed to converge.

    Attributes
    ----------
    sweeps : number of sweeps/refinements performed before giving up.
    """

    def __init__(self, msg, sweeps=None):
        super().__init__(msg)
        self.sweeps = sweeps


class NearSingularError(SdeDiscError, ArithmeticError):
    """Eigenvalue-sum condition for a unique Sylvester/Lyapunov solution
    is violated (lambda_i(A) + lambda_j(B) ~= 0).

    Attributes
    ----------
    pair : the offending eigenvalue pair (complex, complex).
    """

    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class ClassificationError(SdeDiscError, RuntimeError):
    """A 2x2 Schur block straddles the zero-eigenvalue threshold."""


class NilpotencyError(SdeDiscError, ValueError):
    """Matrix expected to be nilpotent is not, within tolerance."""


class UnsupportedSpectrumError(SdeDiscError, ValueError):
    """The system has non-zero poles mirrored in the imaginary axis,
    which no exact method in this library supports."""


class MethodNotApplicableError(SdeDiscError, RuntimeError):
    """The requested discretization method cannot handle this system."""
