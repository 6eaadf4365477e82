"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """An enumeration or search went past its configured budget.

    This is never a verdict about the instance: a run that raises it has
    neither found nor ruled out a solution.
    """

    def __init__(self, what, limit):
        self.what = what
        self.limit = limit
        super().__init__(f"{what} budget exceeded (limit {limit})")


class InstanceFormatError(ValueError):
    """Malformed instance or schedule text, with the offending line."""

    def __init__(self, message, line):
        self.line = line
        super().__init__(f"{message} at line {line}")


class InfeasibleError(ValueError):
    """A solution handed to an operation does not satisfy its constraints."""
