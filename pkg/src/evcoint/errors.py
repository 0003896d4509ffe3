"""Exception hierarchy shared by all evcoint modules.

Exit-code mapping used by the CLI:
  InputError  -> 2, NumericError -> 3, ConfigError -> 4.
"""


class EvcointError(Exception):
    """Base class for all evcoint errors."""


class InputError(EvcointError):
    """Bad input data (files, series, columns)."""


class ParseError(InputError):
    def __init__(self, row, col, message):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, column {col}: {message}")


class MissingColumn(InputError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"column {name!r} not found in input")


class NonPositiveForLog(InputError):
    def __init__(self, row, col):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, column {col}: log transform requires strictly positive values")


class SeriesTooShort(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class NumericError(EvcointError):
    """Numerical failure in an engine (rank deficiency, eigen failure, ...)."""


class RankDeficient(NumericError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"design matrix is rank deficient at column {column}")


class DimensionMismatch(NumericError):
    pass


class NotPositiveDefinite(NumericError):
    pass


class EigenFailure(NumericError):
    pass


class DegenerateRss(NumericError):
    """Restricted regression fits the data perfectly; the test is meaningless."""


class EmptyStream(NumericError):
    pass


class NonFiniteLogPosterior(NumericError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"non-finite log posterior at draw {index}")


class ConfigError(EvcointError):
    """Invalid run configuration."""
