"""
Exceptions raised by hyperbisect

Every error raised on purpose by the package derives from
HyperbisectError so the command line can map it to an exit code.

"""


class HyperbisectError(Exception):
    """Base class for all package errors"""


class HypergraphError(HyperbisectError, ValueError):
    """A hypergraph invariant is violated or cannot be generated"""


class ParseError(HypergraphError):
    """
    Malformed hypergraph text

    Arguments:
        path (str) : File being parsed
        lineno (int) : 1-based line number of the offending line
        msg (str) : What is wrong with the line

    """

    def __init__(self, path: str, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


class GeometryError(HyperbisectError, ValueError):
    """Bad vectors, angles or Gram matrices"""


class EmbeddingError(HyperbisectError, ValueError):
    """The vector embedding cannot be built or is broken"""


class GuardError(HyperbisectError):
    """Instance is too large for an exhaustive routine"""


class NumericError(HyperbisectError, ArithmeticError):
    """Non-finite intermediate values"""
