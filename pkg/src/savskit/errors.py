"""Exception types shared across the toolkit."""


class SavskitError(Exception):
    """Base class for all toolkit errors."""


class DataError(SavskitError, ValueError):
    """Invalid input data: bad files, dimension mismatches, non-numeric cells."""


class ConfigError(SavskitError, ValueError):
    """Invalid configuration values."""


class NumericalError(SavskitError, RuntimeError):
    """Numerical failure at runtime (non-finite values, failed factorizations)."""
