"""Exception hierarchy shared by the library and the CLI."""


class ShrinkCovError(Exception):
    """Base class for all errors raised by shrinkcov."""


class DataError(ShrinkCovError, ValueError):
    """Input data is malformed or violates a precondition (e.g. too few rows)."""


class NumericalError(ShrinkCovError, ArithmeticError):
    """A numerical procedure failed (non-PSD matrix, degenerate denominator)."""
