class InputError(ValueError):
    """Malformed or out-of-domain input."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured size budget."""


class ContractViolation(ValueError):
    """A function was called outside its documented preconditions."""


class VerificationError(RuntimeError):
    """An internal cross-check failed."""
