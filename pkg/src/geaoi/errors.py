"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a model invariant (bad rate, probability, config)."""


class InfeasibleBudgetError(ValueError):
    """No transition matrix satisfies the average-cost budget."""
