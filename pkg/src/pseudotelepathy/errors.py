"""Exception types raised across the package."""


class BudgetExceededError(ValueError):
    """Raised when a strategy enumeration would exceed the configured budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} deterministic strategies, budget is {budget}"
        )


class InvalidStrategyError(ValueError):
    pass


class ParityError(ValueError):
    """A row or column of a table violates the parity its party promised."""


class NonCommutingError(ValueError):
    pass


class NotWinningError(ValueError):
    """A quantum strategy passed to the extractor does not win with certainty."""


class NoOverlapError(NotWinningError):
    pass


class DegenerateFaceError(ValueError):
    """No deterministic strategy saturates the expression's bound."""


class FormatError(ValueError):
    """Malformed game or expression document."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
