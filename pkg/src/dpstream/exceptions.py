"""Exception types shared across the package."""


class DpStreamError(Exception):
    """Base class for all dpstream errors."""


class ZeroTotalError(DpStreamError):
    """A count vector with zero total cannot be normalized (empty time slot)."""


class DomainMismatchError(DpStreamError):
    """Two distributions with different domain sizes were combined."""


class InvalidDomainError(DpStreamError):
    """A domain or trial-count parameter is outside its valid range."""


class OutOfDomainError(DpStreamError):
    """A numeric argument is outside the function's domain."""


class WeightRowError(DpStreamError):
    """A sampling-weight row violates its normalization invariant."""


class ConfigError(DpStreamError):
    """A configuration object violates its invariants."""


class BudgetExhaustedError(DpStreamError):
    """No per-slot budgets remain; the stream must stop or restart."""


class BudgetOverflowError(DpStreamError):
    """Recording this slot would push cumulative privacy cost past the total."""


class MissingTotalError(DpStreamError):
    """A count-scaled query was evaluated without a released total."""


class MalformedRowError(DpStreamError):
    """A stream file row could not be parsed."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NonContiguousSlotsError(DpStreamError):
    """Slot indices in a stream file are not contiguous from 0."""
