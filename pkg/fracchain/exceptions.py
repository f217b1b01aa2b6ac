"""Exception hierarchy for fracchain."""


class FracchainError(Exception):
    """Base class for all package errors."""


class HorizonTooSmallError(FracchainError, ValueError):
    """The first-return law was cut off before its tail became negligible."""


class WindowTooSmallError(FracchainError, ValueError):
    """A fit window or an enumeration window does not hold enough mass or points."""


class CouplingRadiusError(FracchainError, ValueError):
    """A coupling sequence is too short for the requested chain."""


class FactorizationError(FracchainError, ArithmeticError):
    """A matrix expected to be positive definite failed to factorize."""


class SolverError(FracchainError, RuntimeError):
    """A sparse solve did not reach the requested residual."""


class QuadratureError(FracchainError, RuntimeError):
    """Numerical integration failed or produced an inconsistent value."""


class ConfigError(FracchainError, ValueError):
    """Invalid experiment configuration."""


class MissingArtifactError(FracchainError, FileNotFoundError):
    """A run directory lacks the files a report needs."""
