"""Exception types shared across the toolkit.

Every error raised by the library derives from :class:`GapDensError`, so
callers (and the CLI) can distinguish "bad input" from genuine bugs.
"""

from __future__ import annotations


class GapDensError(Exception):
    """Base class for all toolkit errors."""


class EmptyInput(GapDensError):
    """An operation received an empty term list."""


class NotStrictlyIncreasing(GapDensError):
    """Terms are not strictly increasing.

    ``index`` is the 0-based position of the first offending element, i.e.
    the element that fails to exceed its predecessor.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"terms not strictly increasing at index {index}")


class PrecisionUnderflow(GapDensError):
    """Two log-domain terms cannot be separated at the requested precision."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(
            message
            or f"consecutive terms indistinguishable at index {index} for the requested precision"
        )


class TooShort(GapDensError):
    """The prefix (or stream) has fewer elements than the operation needs."""


class InvalidParam(GapDensError):
    """A parameter violates its documented precondition."""


class FloorUncertifiable(GapDensError):
    """The interval around a real value straddles an integer at maximum precision."""


class EmptyStream(GapDensError):
    """A functional stream with no samples was passed to an estimator."""


class LengthMismatch(GapDensError):
    """Paired sequences have different lengths."""


class NotIncreasing(GapDensError):
    """A sequence required to be strictly increasing is not."""


class InvalidSigma(GapDensError):
    """The series exponent sigma is outside (0, inf)."""


class NoBracket(GapDensError):
    """No (Diverging, Converging) verdict pair exists in the requested sigma range."""


class InvalidGrid(GapDensError):
    """An analytic-check grid specification is unusable."""


class SchemaError(GapDensError):
    """A serialized report does not match the published schema."""
