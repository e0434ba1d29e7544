class MinorFreeError(Exception):
    """Base class for errors raised by this package."""


class UsageError(MinorFreeError, ValueError):
    """Invalid argument: unknown vertex, wrong graph model, malformed input."""


class BudgetError(MinorFreeError):
    """An exact computation would exceed its configured size budget."""

    def __init__(self, message: str, size: int | None = None):
        super().__init__(message)
        self.size = size


class ConfigError(MinorFreeError):
    """Experiment configuration does not match the schema."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
