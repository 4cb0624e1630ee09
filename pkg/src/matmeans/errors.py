"""Exception hierarchy. Every error carries a stable ``code`` string."""


class MatMeansError(Exception):
    code = "ERROR"


class NonHermitianError(MatMeansError, ValueError):
    code = "NON_HERMITIAN"


class NoConvergenceError(MatMeansError, RuntimeError):
    code = "NO_CONVERGENCE"


class NotPositiveDefiniteError(MatMeansError, ValueError):
    code = "NOT_POSITIVE_DEFINITE"


class DomainError(MatMeansError, ValueError):
    code = "DOMAIN_ERROR"


class DimensionMismatchError(MatMeansError, ValueError):
    code = "DIMENSION_MISMATCH"


class ParameterRangeError(MatMeansError, ValueError):
    """Out-of-range scalar parameter; ``code`` names which one."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class LengthMismatchError(MatMeansError, ValueError):
    code = "LENGTH_MISMATCH"


class NonPositiveForLogError(MatMeansError, ValueError):
    code = "NONPOSITIVE_FOR_LOG"


class PremiseViolatedError(MatMeansError, ValueError):
    code = "PREMISE_VIOLATED"


class ConstructionFailedError(MatMeansError, RuntimeError):
    code = "CONSTRUCTION_FAILED"


class ConfigInvalidError(MatMeansError, ValueError):
    code = "CONFIG_INVALID"


class ParseError(MatMeansError, ValueError):
    code = "PARSE_ERROR"
