"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 1, numerical problems with 2.
"""


class OscnetError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(OscnetError, ValueError):
    """Invalid input: bad graph, parameter out of range, malformed config."""

    exit_code = 1


class NumericalFailure(OscnetError, ArithmeticError):
    """Blow-up, non-convergence or a missing limit cycle."""

    exit_code = 2


class UnsupportedCase(NumericalFailure):
    """A well-posed input the Floquet machinery deliberately does not handle
    (defective monodromy, negative real multipliers)."""
