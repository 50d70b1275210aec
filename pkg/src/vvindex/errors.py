"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2, TheoremViolationError -> 1,
NumericalError (and subclasses) -> 3.
"""


class VvindexError(Exception):
    """Base class for all package errors."""


class ConfigError(VvindexError):
    """Invalid or inconsistent run configuration."""


class UnsupportedGroupError(ConfigError):
    """Requested Lie type or rank outside the supported tables."""


class NumericalError(VvindexError):
    """A numerical procedure failed (no convergence, singular evaluation, ...)."""


class SingularEvaluationError(NumericalError):
    """Evaluation requested at or too close to a singular locus."""


class NoConvergenceError(NumericalError):
    """Iterative corrector exhausted its iteration budget."""


class PathFailureError(NumericalError):
    """Continuation step size underflowed; carries the last good point."""

    def __init__(self, message, last_t=None, last_point=None):
        super().__init__(message)
        self.last_t = last_t
        self.last_point = last_point


class FitFailureError(NumericalError):
    """Polynomial reconstruction residual exceeded its bound."""


class TheoremViolationError(VvindexError):
    """A quantity the vanishing theorem constrains came out wrong."""


class InternalError(VvindexError):
    """Internal consistency check failed (a bug, not a user error)."""
