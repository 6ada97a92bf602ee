"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class FeatAggError(Exception):
    """Base class for all errors raised by featagg."""


class InvalidData(FeatAggError, ValueError):
    """Input arrays are malformed: wrong shapes, non-finite values, bad labels."""


class InsufficientSamples(FeatAggError, ValueError):
    """Too few rows for the requested estimator."""


class SingularDesign(FeatAggError, ArithmeticError):
    """The Gram matrix of a least-squares design is numerically singular."""


class DegenerateTarget(FeatAggError, ValueError):
    """The target has zero variance or a single class."""


class InvalidMoments(FeatAggError, ValueError):
    """A set of population moments is not realizable by any distribution."""


class ConfigError(FeatAggError, ValueError):
    """An experiment or reduction configuration is invalid."""


class ParseError(FeatAggError, ValueError):
    """A CSV file could not be parsed.

    Attributes
    ----------
    row : int
        1-based line number in the file (the header is line 1).
    column : str
        Name of the offending column, or ``""`` when the whole row is bad.
    """

    def __init__(self, message: str, row: int, column: str = "") -> None:
        self.row = row
        self.column = column
        where = f"line {row}" + (f", column {column!r}" if column else "")
        super().__init__(f"{where}: {message}")
