"""Exception types shared across the package."""


class SchullError(Exception):
    """Base class for all package-specific errors."""


class GeometryError(SchullError):
    """Degenerate or near-degenerate geometric configuration.

    Raised when a predicate cannot be decided reliably at the configured
    tolerance (coincident points, affinely dependent spanning sets, more
    points on a hyperplane than general position allows, ...).
    """


class DatasetError(SchullError):
    """Invalid dataset content or malformed dataset/graph input."""


class CapabilityError(SchullError):
    """Request outside the supported envelope (dimension, size guard)."""
