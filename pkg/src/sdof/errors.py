"""Exception types shared across the package."""


class SdofError(Exception):
    """Base class for all package errors."""


class ParameterError(SdofError, ValueError):
    """An argument is outside its documented valid range."""


class ModeError(SdofError, ValueError):
    """A realization or scheme is in the wrong mode (fixed/fading, wrong model)."""


class EncodingError(SdofError, ValueError):
    """A symbol assignment cannot be encoded."""


class CapacityError(SdofError, RuntimeError):
    """An enumeration or memory budget would be exceeded."""


class UsageError(SdofError, ValueError):
    """Invalid CLI configuration."""
