"""Exception types shared across the package."""


class ShiftlabError(Exception):
    """Base class for all package errors."""


class AlphabetMismatch(ShiftlabError):
    """Two words (or a word and an oracle) use different alphabets."""


class HorizonExceeded(ShiftlabError):
    """A query needs factor data beyond the oracle's horizon.

    ``required`` carries the smallest horizon that would have sufficed,
    when known.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class NotAFactor(ShiftlabError):
    """The queried word is not in the language."""


class InvalidStep(ShiftlabError):
    """A periodic-power step does not satisfy the shift-match equation."""


class PreconditionFailure(ShiftlabError):
    """A documented operation precondition does not hold for the input."""


class InadmissibleMove(ShiftlabError):
    """A graph rewrite whose result violates the structural rules."""


class InvariantViolation(ShiftlabError):
    """An internal consistency check failed; indicates a bug, not bad input."""
