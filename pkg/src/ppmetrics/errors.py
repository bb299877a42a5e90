"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class DimensionMismatchError(ValueError):
    """Two geometric objects do not share a coordinate dimension."""


class PatternFileError(ValueError):
    """A pattern text file could not be parsed.

    Carries the offending line number when one is known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
