"""Exception types shared across the package.

Both inherit from ``ValueError`` so callers that do not care about the
distinction can catch the usual thing; the CLI maps them to separate
exit codes.
"""


class PreconditionError(ValueError):
    """An argument violates a documented precondition (shape, range, finiteness)."""


class ParseError(ValueError):
    """An input file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)
