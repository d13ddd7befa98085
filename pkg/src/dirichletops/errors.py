"""Exception types shared across the package.

Separate classes per failure mode so callers (and the CLI exit-code mapping)
can distinguish bad input from exhausted numerical budgets or resource caps.
"""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class InvalidSymbolError(ValueError):
    """Symbol parameters violate the half-plane mapping condition."""


class NonCompactError(ValueError):
    """Operation requires a compact (or at least non-boundary) symbol."""


class BudgetExhaustedError(RuntimeError):
    """Requested tolerance not reachable within the term budget.

    Carries the error bound that was actually achieved so callers can decide
    whether the partial result would have been good enough.
    """

    def __init__(self, message: str, achieved_error_bound: float):
        super().__init__(message)
        self.achieved_error_bound = achieved_error_bound


class BracketingError(RuntimeError):
    """A root finder could not bracket a sign change."""


class MatrixSizeError(RuntimeError):
    """Requested truncation exceeds the configured entry-count cap."""
