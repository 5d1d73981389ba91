"""Exception types shared across the package."""


class VortsymError(Exception):
    """Base class for package errors."""


class DomainError(VortsymError, ValueError):
    """A value was requested outside the domain where it is defined."""


class UnsupportedOperation(VortsymError, ValueError):
    """The result of an operation leaves the representable function class."""


class FlavorMismatch(VortsymError, TypeError):
    """Two generators from different symmetry algebras were combined."""


class ConfigError(VortsymError, ValueError):
    """Invalid run configuration or family descriptor."""
