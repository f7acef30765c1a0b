"""Shared exception types.

Exit-code mapping used by the CLI: BudgetExceededError -> 2,
VerificationError -> 3, bad arguments -> 4.
"""


class BudgetExceededError(RuntimeError):
    """An operation would exceed its configured enumeration/state budget."""


class VerificationError(AssertionError):
    """A structural invariant of the model failed to verify."""


class PoleError(ZeroDivisionError):
    """A rational function was evaluated at a pole of its reduced denominator."""


class SingularMatrixError(ValueError):
    """Exact linear solve hit a singular matrix (Gram matrix with d < k)."""
