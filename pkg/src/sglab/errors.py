"""Typed failures, mapped to process exit codes by the command line front end."""


class SGLabError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(SGLabError):
    """Unusable configuration file or command line input (exit code 1)."""


class ConvergenceError(SGLabError):
    """A numerical routine failed its convergence guard (exit code 2)."""


class QuadratureConvergenceError(ConvergenceError):
    """Node-halving check moved a quadrature result by more than its tolerance."""

    def __init__(self, message, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class NormDriftError(ConvergenceError):
    """Solver norm left unity by more than the per-step guard."""


class BoxSizeError(ConvergenceError):
    """Grid box cannot hold the packet away from the periodic boundary."""


class ForbiddenRegimeError(SGLabError):
    """Distinguishability exceeded the saturated overlap bound (exit code 3).

    The bound is a theorem for normalized branch packets, so reaching this
    state indicates an implementation bug rather than admissible physics.
    """
