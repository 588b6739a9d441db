"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`FinlocError`,
which is itself a :class:`ValueError` so callers that only care about "bad
input" can catch that.
"""

from __future__ import annotations


class FinlocError(ValueError):
    """Base class for all package errors."""


class WindowTooShort(FinlocError, IndexError):
    """The finite window does not reach far enough for the request.

    This is a truncation signal, not a mathematical failure: a longer window
    of the same infinite object would answer the question.
    """


class TooFewElements(FinlocError):
    pass


class HorizonMismatch(FinlocError):
    pass


class InvalidInstance(FinlocError):
    """An instance violates the invariants of its type."""


class LengthMismatch(FinlocError):
    pass


class SlalomOverflow(FinlocError):
    pass


class NoDominatingSet(FinlocError):
    pass


class Infeasible(FinlocError):
    pass


class UndecidablePrefix(FinlocError):
    """A coded sequence is longer than the known prefix of the branch."""


class DomainError(FinlocError):
    """A finite function was evaluated outside its domain."""


class DensityInsufficient(FinlocError):
    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message)
        self.index = index


class NormTableError(FinlocError):
    pass


class CreatureError(FinlocError):
    pass


class IntervalOverlap(CreatureError):
    pass


class SuccessiveRamification(CreatureError):
    pass


class WeightTooSmall(CreatureError):
    pass


class NormAxiomViolation(CreatureError):
    pass


class SparsityViolation(FinlocError):
    pass


class DepthExceeded(FinlocError):
    pass
