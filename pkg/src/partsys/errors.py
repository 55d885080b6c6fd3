"""Exception types shared across the toolkit.

Errors are grouped by the stage that raises them so the CLI can map them
onto stable exit codes: configuration (2), data (3), training (4).
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid schema, run configuration, or constraint specification."""


class DataError(ValueError):
    """Problem with the rows of a dataset source."""


class MissingColumn(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"required column {column!r} not found")


class UnknownLevel(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}: value {value!r} is not a declared level of column {column!r}")


class NonNumericFeature(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}: feature column {column!r} has non-numeric value {value!r}")


class MissingValue(DataError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}: column {column!r} is empty")


class EmptySplit(DataError):
    def __init__(self, part: str, detail: str = ""):
        self.part = part
        msg = f"split would leave the {part!r} part empty"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class TrainingError(ValueError):
    """Problem while fitting or applying a model."""


class InsufficientData(TrainingError):
    def __init__(self, detail: str):
        super().__init__(detail)


class ShapeMismatch(TrainingError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"feature width {got} does not match the trained width {expected}")


class UndefinedMetric(TrainingError):
    def __init__(self, detail: str):
        super().__init__(detail)


class PartialInput(ValueError):
    """A full group was required but a partial report was supplied."""


class NonTruthfulReport(ValueError):
    """A simulated agent attempted to report a membership it does not hold."""


class ArtifactError(ValueError):
    """Serialized system document is malformed or incompatible."""
