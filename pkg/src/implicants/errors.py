"""Exception types shared across the package."""


class ImplicantsError(Exception):
    """Base class for errors raised by this package."""


class ParseError(ImplicantsError):
    """Malformed input text (truth table files, ternary strings).

    Carries optional line/column information for CLI diagnostics.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class ResourceLimitError(ImplicantsError):
    """A computation would exceed a configured memory or size budget."""
