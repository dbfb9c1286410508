"""Exception hierarchy shared by every module."""


class ESHingeError(Exception):
    """Base class for all library errors."""


class PointSetError(ESHingeError, ValueError):
    """Malformed or duplicate input points."""


class SizeLimitExceeded(ESHingeError):
    """An instance is larger than the configured limit of an exact routine."""


class ResourceLimitExceeded(ESHingeError):
    """A wall-clock budget ran out."""


class InvariantViolation(ESHingeError):
    """An internal consistency check failed; indicates a bug or corrupted input."""

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}" if detail else invariant)
