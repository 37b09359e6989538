"""Exception hierarchy shared by every module of the package."""


class RemovabilityError(Exception):
    """Base class for all errors raised by :mod:`removability`."""


class InvalidDimensionError(RemovabilityError, ValueError):
    """Ambient dimension outside the range an operation supports."""


class DomainError(RemovabilityError, ValueError):
    """Point, radius or region outside the domain of an operation."""


class UnsupportedVariantError(RemovabilityError, TypeError):
    """Operation is not defined for the given map / field / gauge variant."""


class ResolutionError(RemovabilityError, ValueError):
    """Requested scale is below what the data or quadrature can resolve."""


class NotApplicableError(RemovabilityError, ValueError):
    """A condition that has no meaning in the given setting (e.g. n = 2)."""


class IncompleteInputError(RemovabilityError, ValueError):
    """Required hypothesis flags or parameters are missing."""


class ValidationError(RemovabilityError, ValueError):
    """A job configuration failed schema validation."""
