"""
Structured errors raised by the numerics, solver, masking and audit layers
"""


class LPMaskError(Exception):
    """Base class for every error raised by this package"""


class DimensionMismatch(LPMaskError, ValueError):
    """Operands have incompatible shapes"""

    def __init__(self, operation: str, lhs_shape: tuple, rhs_shape: tuple):
        self.operation = operation
        self.lhs_shape = lhs_shape
        self.rhs_shape = rhs_shape
        super().__init__(
            f"{operation}: incompatible shapes {_fmt_shape(lhs_shape)} and {_fmt_shape(rhs_shape)}"
        )


class NonSquareMatrix(LPMaskError, ValueError):
    """Operation requires a square matrix"""

    def __init__(self, operation: str, shape: tuple):
        self.operation = operation
        self.shape = shape
        super().__init__(f"{operation}: matrix must be square, got {_fmt_shape(shape)}")


class SingularMatrix(LPMaskError, ArithmeticError):
    """Matrix has zero determinant"""


class InvalidProblem(LPMaskError, ValueError):
    """A problem violates its type invariants"""


class SignPreconditionError(LPMaskError, ValueError):
    """solve_nonneg received a free variable"""


class OracleRefused(LPMaskError):
    """Instance too large for brute-force vertex enumeration"""


class CertificateUnverified(LPMaskError):
    """A verdict cannot be checked on this instance; callers should skip, not fail"""


class ResamplingExhausted(LPMaskError):
    """A rejection-sampling loop hit its attempt cap"""


class InvariantViolation(LPMaskError, AssertionError):
    """An internal invariant of the audit pipeline does not hold"""


class FileFormatError(LPMaskError, ValueError):
    """A problem, key, solution or report file cannot be parsed"""


class KeyValidationError(LPMaskError, ValueError):
    """A masking key does not satisfy its invariants for the given problem"""


class ReportValidationError(LPMaskError, ValueError):
    """An audit report fails its accounting or trial re-validation"""


def _fmt_shape(shape: tuple) -> str:
    return "x".join(str(d) for d in shape)
