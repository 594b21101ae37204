"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the region where a formula or model is valid."""


class UnsupportedDimensionError(DomainError):
    """The exact backend does not handle this dimension; use Monte Carlo."""


class SizeLimitError(DomainError):
    """An exact combinatorial routine was asked to handle too large an input."""
