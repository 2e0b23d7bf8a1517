"""Exception hierarchy shared across the package."""


class MfkrigError(Exception):
    """Base class for all package errors."""


class InputShapeError(MfkrigError, ValueError):
    """Array dimensions do not agree."""


class DomainError(MfkrigError, ValueError):
    """A parameter lies outside its mathematical domain."""


class InvalidArgumentError(MfkrigError, ValueError):
    pass


class IllConditionedError(MfkrigError, ArithmeticError):
    """Cholesky factorization of the correlation matrix failed."""

    def __init__(self, message, nugget=None):
        super().__init__(message)
        self.nugget = nugget


class UnfittableDataError(MfkrigError, RuntimeError):
    """No optimizer restart produced a factorizable correlation matrix."""


class InsufficientDataError(MfkrigError, ValueError):
    pass


class NestingError(MfkrigError, ValueError):
    """High-fidelity design is not contained in the lower-fidelity design."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class DegenerateResponseError(MfkrigError, ValueError):
    pass


class ParseError(MfkrigError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class SchemaError(MfkrigError, ValueError):
    pass


class RangeError(MfkrigError, ValueError):
    pass
