"""Exception hierarchy shared by every module."""


class TropicertError(Exception):
    """Base class for all library errors."""


class ZeroVector(TropicertError, ValueError):
    """A zero vector was given where a direction is required."""


class Infeasible(TropicertError):
    """A linear or realization problem has no admissible solution."""
