"""Exception hierarchy.

Every error raised on purpose by the package derives from ``LpflowError``.
Numerical breakdowns (eigensolver, quadrature) derive from
``NumericalFailure`` so callers such as the CLI can map them to a distinct
exit status.
"""


class LpflowError(Exception):
    """Base class for all package errors."""


class NumericalFailure(LpflowError):
    """An iterative numerical method did not reach its target."""


class NoConvergence(NumericalFailure):
    def __init__(self, msg, block=None):
        super().__init__(msg)
        self.block = block


class QuadratureFailure(NumericalFailure):
    pass


class AlgebraMismatch(LpflowError, ValueError):
    """Operands live in different block algebras or have the wrong shape."""


class NonHermitian(LpflowError, ValueError):
    pass


class DomainError(LpflowError, ValueError):
    """A scalar function is undefined somewhere on the spectrum."""


class KernelTooClose(DomainError):
    """An eigenvalue sits within ``zero_tol`` of zero where sgn is needed."""


class BadExponent(LpflowError, ValueError):
    pass


class DegeneratePair(LpflowError, ValueError):
    """A Schur coefficient pair has ``lambda_m + mu_n == 0``."""


class NotCommuting(LpflowError, ValueError):
    pass


class DegenerateSplit(LpflowError, ValueError):
    """The positive or negative spectral part of an operator is trivial."""


class SupportDeficient(LpflowError, ValueError):
    pass


class OrderViolation(LpflowError, ValueError):
    """A required operator ordering ``-y <= x <= y`` fails."""


class NotPSD(LpflowError, ValueError):
    pass


class NotSymmetry(LpflowError, ValueError):
    """``F0**2 != 1`` where a symmetry is required."""


class EndpointKernel(LpflowError, ValueError):
    """A path endpoint is not invertible (within tolerance)."""


class StepTooSmall(LpflowError, ValueError):
    pass


class SuiteUnknown(LpflowError, KeyError):
    pass


class ConfigError(LpflowError, ValueError):
    pass
