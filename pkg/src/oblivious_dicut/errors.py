"""Exception hierarchy shared by the library and the CLI.

Each class carries the CLI exit code it maps to.
"""


class DicutError(Exception):
    exit_code = 1


class ParseError(DicutError, ValueError):
    """Malformed text input. ``line`` and ``column`` are 1-based when known."""

    exit_code = 2

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class LimitExceeded(DicutError):
    exit_code = 3


class ZeroWeightGraph(DicutError, ValueError):
    """Raised when a ratio is requested for a graph without edges."""

    exit_code = 1


class SolverError(DicutError):
    exit_code = 4


class IterationLimit(SolverError):
    pass


class SingularBasis(SolverError):
    pass


class CertificateInvalid(DicutError):
    exit_code = 5
