"""Exception types shared across the package.

The CLI maps each class to a distinct exit code so scripts can tell a bad
configuration from bad data or a numerical failure.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class DataError(ValueError):
    """Input data violates a precondition (parse failure, gaps, too short)."""


class NumericalError(RuntimeError):
    """An estimator or trainer failed numerically (non-convergence, divergence)."""
