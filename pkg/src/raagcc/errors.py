"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed user input: unknown generators, bad files, invalid parameters."""


class ContractError(RuntimeError):
    """An operation was invoked outside its stated precondition."""


class BudgetExceededError(RuntimeError):
    """A search or construction exceeded its resource budget.

    ``partial_count`` carries how much work completed before the budget
    tripped, so callers can report progress in an inconclusive result.
    """

    def __init__(self, message: str, partial_count: int | None = None):
        super().__init__(message)
        self.partial_count = partial_count


class InternalError(RuntimeError):
    """An invariant believed impossible to violate was violated."""
