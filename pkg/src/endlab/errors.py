"""Shared exception types."""


class BudgetExceeded(RuntimeError):
    """An enumeration hit its element cap before finishing."""


class GenerationError(ValueError):
    """A generating set failed to reach the cosets it was promised to reach."""
