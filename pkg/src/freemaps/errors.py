"""Exception types shared across the package."""

from __future__ import annotations


class FreemapsError(Exception):
    """Base class for all errors raised by freemaps."""


class RankError(FreemapsError, ValueError):
    """A generator index lies outside the rank, or two ranks disagree."""


class ParseError(FreemapsError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class CapExceeded(FreemapsError):
    """An iterated image grew past the configured length cap."""

    def __init__(self, message: str, power: int | None = None, length: int | None = None):
        super().__init__(message)
        self.power = power
        self.length = length


class BudgetExceeded(FreemapsError):
    """An enumeration would produce more items than the configured budget."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class NoRemnant(FreemapsError):
    """Wagner's algorithm is not certified: some generator has no remnant.

    ``partition`` holds the (uncertified) fixed point class partition so the
    caller can still look at it.
    """

    def __init__(self, message: str, partition=None):
        super().__init__(message)
        self.partition = partition


class NotInSl(FreemapsError):
    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level


class DomainError(FreemapsError, ValueError):
    pass


class NonConvergence(FreemapsError):
    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(f"{message}: bracket [{lower}, {upper}]")
        self.lower = lower
        self.upper = upper
