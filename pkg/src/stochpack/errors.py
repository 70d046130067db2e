"""Exception types shared across the package."""


class StochpackError(Exception):
    """Base class for all library-specific failures."""


class StructureError(StochpackError, ValueError):
    """Malformed input: dimension mismatch, unknown field, bad parameter range.

    Distinct from a modelling-assumption violation, which is reported through
    a validation report rather than raised.
    """


class SizeRefusalError(StochpackError):
    """An exact method refused an instance above its designed size limit.

    Raised before any work is done, so callers can fall back or skip.
    """


class PivotLimitError(StochpackError):
    """The simplex iteration safeguard tripped.

    Should not happen with least-index pivoting on well-posed inputs; kept as
    a hard stop instead of silently looping.
    """
