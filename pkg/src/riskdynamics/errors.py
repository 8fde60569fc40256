"""Exception hierarchy.

Two families matter to callers: ``DataError`` (bad or incompatible input,
CLI exit code 2) and ``NumericError`` (a computation cannot proceed on
otherwise well-formed input, CLI exit code 3).
"""


class RiskDynamicsError(Exception):
    """Base class for every error raised by this package."""


class DataError(RiskDynamicsError):
    """Input data is missing, malformed, or incompatible."""


class NumericError(RiskDynamicsError):
    """A numeric procedure cannot proceed (degenerate geometry, no variance, ...)."""


class MissingFileError(DataError):
    pass


class MissingColumnError(DataError):
    def __init__(self, name: str):
        super().__init__(f"required column {name!r} not found in header")
        self.name = name


class EmptyDatasetError(DataError):
    pass


class DuplicateKeyError(DataError):
    def __init__(self, country: str, year: int):
        super().__init__(f"duplicate record for ({country!r}, {year})")
        self.country = country
        self.year = year


class EmptySplitError(DataError):
    pass


class TooFewValuesError(DataError):
    pass


class TooFewRowsError(DataError):
    pass


class DimensionMismatchError(DataError):
    pass


class LengthMismatchError(DataError):
    pass


class NonBinaryLabelsError(DataError):
    pass


class OneClassError(DataError):
    """Both classes are required but only one is present."""


class UnknownCategoryError(DataError):
    def __init__(self, field: str, value: str):
        super().__init__(f"category {value!r} of {field!r} was not seen during fit")
        self.field = field
        self.value = value


class UnknownVariableError(DataError):
    pass


class AllHiddenError(DataError):
    """Hiding this many labels cannot leave one visible label per class."""


class NoVisibleLabelsError(DataError):
    pass


class SingleClusterError(DataError):
    """A validity index needs at least two clusters."""


class EmptySourceClusterError(DataError):
    pass


class MissingAssignmentError(DataError):
    def __init__(self, country: str, year: int):
        super().__init__(f"no cluster assignment for ({country!r}, {year})")
        self.country = country
        self.year = year


class ZeroVarianceError(NumericError):
    def __init__(self, what: str = "input"):
        super().__init__(f"{what} has zero variance")
        self.what = what


class RankDeficientError(NumericError):
    def __init__(self, requested: int, rank: int):
        super().__init__(f"requested {requested} components but matrix rank is {rank}")
        self.requested = requested
        self.rank = rank


class PipelineStageError(RiskDynamicsError):
    """Wraps the failing stage name around the underlying cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
