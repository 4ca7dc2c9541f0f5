"""Exception types shared across the package."""

__all__ = [
    "ParameterError",
    "UnsupportedScaleError",
    "InsufficientDataError",
    "CorruptionError",
    "InfeasibleError",
    "StructuralError",
]


class ParameterError(ValueError):
    """An argument or argument combination is outside the supported domain."""


class UnsupportedScaleError(ParameterError):
    """The requested layout needs more codeword coordinates than the field has."""


class InsufficientDataError(ValueError):
    """Fewer distinct coordinates were supplied than the message length requires."""


class CorruptionError(Exception):
    """Stored or decoded content is inconsistent with its verification data."""


class InfeasibleError(ValueError):
    """No storage size satisfies the requested per-node bandwidth."""


class StructuralError(RuntimeError):
    """An internal layout or graph invariant failed; indicates a bug, not bad input."""
