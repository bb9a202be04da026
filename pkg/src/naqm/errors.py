"""Exception hierarchy shared across the package."""


class NAQMError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(NAQMError, ValueError):
    """Operands belong to different algebras or have incompatible shapes."""


class UnsupportedOperationError(NAQMError):
    """Operation needs information the operand does not carry (e.g. a word)."""


class UnknownSymbolError(NAQMError, KeyError):
    pass


class ObservableViolationError(NAQMError, ValueError):
    """Operator expected to be star-fixed is not."""


class PositivityViolationError(NAQMError, ValueError):
    pass


class NormalizationError(NAQMError, ValueError):
    pass


class TraceAxiomError(NAQMError, ValueError):
    pass


class NoEigenvectorError(NAQMError, ValueError):
    pass


class InvalidInputError(NAQMError, ValueError):
    pass


class AlgebraFileError(NAQMError, ValueError):
    """Malformed algebra, word or scenario file."""
