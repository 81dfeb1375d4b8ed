class PQPError(Exception):
    """Base class for all errors raised by pqpath."""


class StructureError(PQPError, ValueError):
    """Malformed problem data: wrong shapes, non-symmetric Q, bad labels, ..."""


class ParseError(PQPError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class InvariantError(PQPError, RuntimeError):
    """A guaranteed property of the algorithm was violated (a bug, not bad input)."""
