"""Exception taxonomy shared across the package.

Every error raised by metroflow's own logic derives from ``MetroflowError``
so callers (and the CLI) can distinguish pipeline failures from bugs.
"""

from __future__ import annotations


class MetroflowError(Exception):
    """Base class for all metroflow errors."""


class ParseError(MetroflowError):
    """A CSV row could not be turned into a valid observation."""

    def __init__(self, line: int, column: str, reason: str):
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column '{column}': {reason}")


class HumidityOutOfRange(ParseError):
    """Humidity outside the physical [0, 100] percent range."""

    def __init__(self, line: int, value: float):
        super().__init__(line, "humidity", f"humidity {value} outside [0, 100]")
        self.value = value


class OutOfServiceWindow(MetroflowError):
    """A clock time falls outside the 06:00-23:00 service window."""


class CoverageGap(MetroflowError):
    """One or more time slices have no weather coverage."""

    def __init__(self, slices):
        self.slices = list(slices)
        preview = ", ".join(str(s) for s in self.slices[:5])
        more = "" if len(self.slices) <= 5 else f" (+{len(self.slices) - 5} more)"
        super().__init__(f"no weather observations for slices: {preview}{more}")


class EmptySelection(MetroflowError):
    """A day filter matched no dates."""


class DegenerateStats(MetroflowError):
    """Station statistics cannot support a quantile classification."""


class MissingKey(MetroflowError):
    """A (station, slice) lookup was not present in the dataset."""


class InsufficientHistory(MetroflowError):
    """The dataset is too short to build any full-lag feature row."""


class DegenerateSplit(MetroflowError):
    """A train/test split would leave one side empty."""


class EmptyInput(MetroflowError):
    """An estimator was fitted on zero rows."""


class WidthMismatch(MetroflowError):
    """Prediction input width differs from the training width."""

    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"expected {expected} feature columns, got {got}")


class LengthMismatch(MetroflowError):
    """Two paired vectors have different lengths."""


class NonFiniteLoss(MetroflowError):
    """Network training diverged to a non-finite loss."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training loss became non-finite at epoch {epoch}")


class ConstantInput(MetroflowError):
    """A correlation input has zero variance."""


class AllZeroResiduals(MetroflowError):
    """Durbin-Watson is undefined for an all-zero residual vector."""


class RankDeficient(MetroflowError):
    """The regression design matrix is not full column rank."""

    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"rank-deficient design matrix; dependent columns: {self.columns}")


class TooFewObservations(MetroflowError):
    """Not enough observations to fit the requested regression."""


class InvalidConfig(MetroflowError):
    """A configuration object violates its invariants."""
