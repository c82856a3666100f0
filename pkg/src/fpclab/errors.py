"""Exception types shared across the package."""


class FPCError(Exception):
    """Base class for every error raised by fpclab."""


class DomainError(FPCError, ValueError):
    """An argument lies outside the domain of the function."""


class DivergenceError(FPCError, ArithmeticError):
    """A fractional moment or normalizer is infinite for the chosen model.

    Typically raised for unclamped Rayleigh fading with an exponent at or
    below -1 (e.g. channel inversion). Switch to ``ClampedRayleigh``.
    """


class InfeasibleError(FPCError, ValueError):
    """The requested operating point cannot be reached.

    Raised when the interference-free SNR is too small for the target SINR,
    or when a target outage sits below the pure-fading outage floor.
    """


class BracketError(FPCError, ValueError):
    """Root-finding bracket does not straddle zero."""


class ConvergenceError(FPCError, ArithmeticError):
    """Numerical procedure failed to converge.

    Attributes
    ----------
    estimate : float
        Best estimate available when the procedure gave up.
    error : float
        Error bound attached to ``estimate``.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(FPCError, ValueError):
    """Invalid run configuration."""
