"""Exception hierarchy.

Everything raised on bad input derives from :class:`ValidationError`; solver
problems derive from :class:`SolverError`. The CLI maps the two families to
exit codes 2 and 1.
"""


class QBoundsError(Exception):
    pass


class ValidationError(QBoundsError, ValueError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotPSDError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class UnsupportedDerivativeError(ValidationError):
    """Derivative has weight on the kernel-kernel block of the state."""


class RLDUndefinedError(ValidationError):
    """Right logarithmic derivative needs a full-rank state."""


class UndefinedCoefficientError(ValidationError):
    pass


class SolverError(QBoundsError, RuntimeError):
    pass


class InfeasibleError(SolverError):
    pass


class ConvergenceError(SolverError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class SingularOutcomeError(SolverError):
    """An outcome has zero probability but a nonzero derivative."""


class GenerationError(SolverError):
    pass
