"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent user input."""


class DSLSyntaxError(InputError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(ArithmeticError):
    """Result not representable in double precision."""


class ResourceError(RuntimeError):
    """A configured size bound was exceeded."""


class ConsistencyError(RuntimeError):
    """Two evaluation routes that must agree did not."""
