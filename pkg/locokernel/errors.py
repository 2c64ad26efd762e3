"""Exception hierarchy shared by every kernel module."""

from typing import Optional


class KernelError(Exception):
    """Base class for all locokernel errors."""


class InvalidArgumentError(KernelError, ValueError):
    """An argument lies outside its documented domain."""


class OutOfBoundsError(KernelError, IndexError):
    """A query point lies outside the heightfield."""


class ShapeError(KernelError, ValueError):
    """An array does not have the shape an operation requires."""


class NumericError(KernelError, ArithmeticError):
    """Non-finite values reached an operation that needs finite input."""


class DegeneratePolygonError(KernelError):
    """Margin requested against a support polygon with fewer than 3 vertices."""


class DomainError(KernelError, ValueError):
    """A physical precondition (e.g. positive pendulum height) is violated."""


class ParamFileError(KernelError):
    """Encoder parameter file is malformed or incompatible."""


class PolicyError(KernelError):
    """A policy callback raised or returned an unusable action."""


class ParseError(KernelError):
    """A text artifact (heightfield, trajectory log) could not be parsed."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class LogParseError(ParseError):
    """A trajectory log line could not be parsed."""


class LogValidationError(KernelError):
    """A trajectory log parsed but violates a log invariant."""

    def __init__(self, message: str, field: str, line_no: Optional[int] = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{field}: {message}")
        self.field = field
        self.line_no = line_no
