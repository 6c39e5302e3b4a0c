"""Exception types shared across the package.

Argument misuse raises plain ValueError; the classes here cover failures
that the command line front end maps to distinct exit codes.
"""


class DataError(Exception):
    """Input data cannot be parsed or is empty after filtering."""


class ParseError(DataError):
    """A row of an input file failed to parse; carries the line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyDatasetError(DataError):
    """An operation left no interactions at all."""


class NumericError(Exception):
    """A numeric computation produced non-finite values or failed to solve."""


class ConfigError(Exception):
    """A run configuration is invalid or references missing paths."""
