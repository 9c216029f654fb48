"""Exception hierarchy shared by all pipeline stages.

Two families map onto the CLI exit codes: ValidationError for bad or
inconsistent input (exit code 2) and NumericalError for computations that
fail or degenerate (exit code 3). Error messages carry region/year/indicator
context wherever the raise site knows it, so the CLI can surface actionable
diagnostics without re-deriving them.
"""


class LctError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LctError):
    """Invalid input data or configuration (CLI exit code 2)."""


class NumericalError(LctError):
    """Numerical failure or degeneracy during computation (CLI exit code 3)."""


# panel ingestion -----------------------------------------------------------

class SchemaMismatchError(ValidationError):
    pass


class MissingCellError(ValidationError):
    pass


class DuplicateCellError(ValidationError):
    pass


class NonFiniteError(ValidationError):
    pass


class UnknownRegionError(ValidationError):
    pass


class MissingIndicatorError(ValidationError):
    pass


class NonPositiveValueError(ValidationError):
    pass


# emissions accounting ------------------------------------------------------

class InvalidShareError(ValidationError):
    pass


class NegativeQuantityError(ValidationError):
    pass


class OccupancyOutOfRangeError(ValidationError):
    pass


class SharesNotNormalizedError(ValidationError):
    pass


# composite index -----------------------------------------------------------

class ConstantColumnError(ValidationError):
    pass


class NonPositiveOffsetError(ValidationError):
    pass


class SingleYearError(ValidationError):
    pass


class AllMaxEntropyError(ValidationError):
    """Every indicator column is constant, so no column carries information."""


# coupling coordination -----------------------------------------------------

class BothZeroError(ValidationError):
    pass


class OutOfRangeError(ValidationError):
    pass


class YearMismatchError(ValidationError):
    pass


class RegionMismatchError(ValidationError):
    pass


# linear programming --------------------------------------------------------

class DimensionMismatchError(ValidationError):
    pass


class NumericalBreakdownError(NumericalError):
    """Simplex could not make progress: pivot below tolerance with no
    alternative column, iteration cap hit, or a post-solve check failed."""


# DEA / productivity --------------------------------------------------------

class LPFailureError(NumericalError):
    pass


class AllInfeasibleError(NumericalError):
    pass


class EmptyTableError(ValidationError):
    pass


# EKC fit -------------------------------------------------------------------

class TooFewPointsError(ValidationError):
    pass


class RankDeficientError(NumericalError):
    pass
