"""Exception types shared across the package."""


class BalanceLensError(Exception):
    """Base class for all balance-lens errors."""


class ConfigError(BalanceLensError, ValueError):
    """Invalid configuration or parameter value (maps to CLI exit code 1)."""


class SingularGammaError(ConfigError):
    """A closed-form coefficient denominator vanishes for this gamma."""


class EdgeListFormatError(BalanceLensError):
    """Malformed edge-list input in strict mode (maps to CLI exit code 3)."""


class UndefinedPositivityError(BalanceLensError):
    """Positivity is undefined: no finite-ratio edges, or fewer than 3 vertices."""


class EstimationError(BalanceLensError):
    """Not enough usable data to fit the requested quantity."""


class UsageError(BalanceLensError):
    """Operation called with arguments outside its contract."""
