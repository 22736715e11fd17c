"""Exception types shared across the package."""


class PrefSearchError(Exception):
    """Base class for all package errors."""


class CatalogParseError(PrefSearchError):
    """The catalog file could not be parsed."""


class ValidationError(PrefSearchError):
    """An invariant was violated; the message names the offending record."""


class ConstraintViolationError(PrefSearchError):
    """The dataset generator's post-generation self-check failed."""


class UnknownFacetError(ValidationError):
    """A criterion or predicate references a facet that is not in the schema."""


class SessionClosedError(PrefSearchError):
    """An event was appended to a session that has already ended."""


class ReplayDivergenceError(PrefSearchError):
    """Recomputing a logged query did not reproduce the recorded ranking."""


class UndefinedRatioError(PrefSearchError):
    """A recall ratio was requested for an empty relevant set."""
