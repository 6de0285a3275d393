"""Exception types raised by the library."""


class SparseRatesError(Exception):
    """Base class; ``category`` is the machine-readable tag used by the CLI."""

    category = "error"


class DomainError(SparseRatesError, ValueError):
    category = "domain"


class ConvergenceError(SparseRatesError, RuntimeError):
    category = "convergence"


class SizeError(SparseRatesError, ValueError):
    category = "size"


class NumericError(SparseRatesError, ArithmeticError):
    category = "numeric"


class ConfigError(SparseRatesError, ValueError):
    category = "config"
