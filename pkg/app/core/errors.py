"""
Error taxonomy shared by the library, the CLI and the HTTP routers.

Every error carries the process exit status the CLI reports for it.
"""

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_FLAG = 2
EXIT_PARSE = 3
EXIT_SHAPE = 4
EXIT_ESTIMATION = 5


class QConvError(Exception):
    exit_code: int = EXIT_INTERNAL
    http_status: int = 400


class ShapeError(QConvError):
    """Inconsistent or impossible tensor dimensions."""
    exit_code = EXIT_SHAPE
    http_status = 422


class ParseError(QConvError):
    """Malformed or missing input file."""
    exit_code = EXIT_PARSE


class FlagError(QConvError):
    exit_code = EXIT_FLAG
    http_status = 422


class ZeroVectorError(QConvError):
    """A vector with zero norm cannot be amplitude-encoded."""
    exit_code = EXIT_ESTIMATION


class DimensionMismatchError(QConvError):
    exit_code = EXIT_ESTIMATION


class InvalidPlanError(QConvError):
    exit_code = EXIT_ESTIMATION
    http_status = 422


class DegenerateBatchError(QConvError):
    """No (row, column) pair of the batched system can be encoded."""
    exit_code = EXIT_ESTIMATION
