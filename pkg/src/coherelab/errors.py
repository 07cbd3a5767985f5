"""Exception types shared across the package."""


class CoherelabError(Exception):
    """Base class for all package errors."""


class InvalidSiteError(CoherelabError):
    """A site index lies outside the chain, or defect sites collide."""


class ConfigurationError(CoherelabError):
    """Inconsistent or unparseable model/experiment configuration."""


class CapacityError(CoherelabError):
    """Requested problem size exceeds the configured dense limit."""


class ContractViolation(CoherelabError):
    """An input breaks a documented precondition (e.g. non-Hermitian matrix)."""


class InsufficientDataError(CoherelabError):
    """Too few levels/samples inside the requested window for the statistic."""


class TruncationError(CoherelabError):
    """A windowed eigensystem misses too much spectral weight for the request."""


class ExtrapolationError(CoherelabError):
    """An energy lies outside the support of a fitted smooth curve."""


class NearSingularityError(CoherelabError):
    """A prediction denominator is too close to zero to be trustworthy."""
