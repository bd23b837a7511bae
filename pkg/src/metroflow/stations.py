"""Station flow statistics, mean/variance quadrant classification, centering."""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass

import numpy as np

from .core import Dataset, DayType
from .errors import DegenerateStats, EmptySelection, InvalidConfig, MissingKey


@dataclass(frozen=True)
class StationStats:
    """Per-station flow summary over a declared day set.

    ``mean_flow`` averages every (day, slot) cell; ``var_flow`` is the
    population variance across slots of the average daily profile
    (per-slot means across days).
    """

    station: int
    mean_flow: float
    var_flow: float


class StationClass(enum.Enum):
    """Mean/variance quadrant of a station.

    ``dummy_index`` fixes the one-hot feature order: type 1 is
    high-mean/high-variance, type 2 low-mean/high-variance, type 3
    high-mean/low-variance, type 4 low-mean/low-variance.
    """

    HIGH_MEAN_HIGH_VAR = "high_mean_high_var"
    LOW_MEAN_HIGH_VAR = "low_mean_high_var"
    HIGH_MEAN_LOW_VAR = "high_mean_low_var"
    LOW_MEAN_LOW_VAR = "low_mean_low_var"

    @property
    def dummy_index(self) -> int:
        return _DUMMY_ORDER.index(self)


_DUMMY_ORDER = (
    StationClass.HIGH_MEAN_HIGH_VAR,
    StationClass.LOW_MEAN_HIGH_VAR,
    StationClass.HIGH_MEAN_LOW_VAR,
    StationClass.LOW_MEAN_LOW_VAR,
)


@dataclass(frozen=True)
class ClassThresholds:
    """Quantile cutoffs for the two-stage classification."""

    mean_quantile: float = 0.90
    var_quantile: float = 0.70

    def __post_init__(self):
        for name in ("mean_quantile", "var_quantile"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise InvalidConfig(f"{name} must be in (0, 1), got {v}")


def station_stats(dataset: Dataset, day_filter: DayType | None = None) -> list[StationStats]:
    """Mean and profile variance per station over the filtered days."""
    mask = dataset.date_mask(day_filter)
    if not mask.any():
        raise EmptySelection(f"no dates match day filter {day_filter}")
    cells = dataset.flow[:, mask, :].astype(float)
    means = cells.mean(axis=(1, 2))
    profiles = cells.mean(axis=1)
    variances = profiles.var(axis=1)
    return [
        StationStats(int(s), float(m), float(v))
        for s, m, v in zip(dataset.stations, means, variances)
    ]


def _nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    """Nearest-rank quantile: the ceil(q*n)-th smallest value."""
    n = len(sorted_values)
    rank = int(np.ceil(q * n))
    rank = min(max(rank, 1), n)
    return float(sorted_values[rank - 1])


def classify_stations(stats: list[StationStats],
                      thresholds: ClassThresholds = ClassThresholds(),
                      ) -> dict[int, StationClass]:
    """Two-stage quadrant classification.

    Stage one marks a station high-mean when its mean lies strictly
    above the nearest-rank ``mean_quantile`` of all means (ties fall to
    the low group). Stage two fits one least-squares line of variance
    on mean over all stations and, within each mean group, marks
    high-variance the stations whose residual lies strictly above the
    group's nearest-rank ``var_quantile`` of residuals. The residual
    line absorbs the roughly linear growth of variance with mean, so
    stage two ranks stations by excess variability rather than size.
    """
    if len(stats) < 2:
        raise InvalidConfig(f"classification needs >= 2 stations, got {len(stats)}")
    means = np.array([s.mean_flow for s in stats])
    variances = np.array([s.var_flow for s in stats])
    if np.all(means == means[0]):
        raise DegenerateStats("all station means identical; quantile split impossible")

    mean_cut = _nearest_rank(np.sort(means), thresholds.mean_quantile)
    high_mean = means > mean_cut

    m_centered = means - means.mean()
    slope = float(np.sum(m_centered * (variances - variances.mean()))
                  / np.sum(m_centered * m_centered))
    intercept = float(variances.mean() - slope * means.mean())
    residuals = variances - (intercept + slope * means)

    out: dict[int, StationClass] = {}
    for group_mask, hi in ((high_mean, True), (~high_mean, False)):
        if not group_mask.any():
            continue
        cut = _nearest_rank(np.sort(residuals[group_mask]), thresholds.var_quantile)
        for i in np.flatnonzero(group_mask):
            high_var = residuals[i] > cut
            if hi:
                cls = (StationClass.HIGH_MEAN_HIGH_VAR if high_var
                       else StationClass.HIGH_MEAN_LOW_VAR)
            else:
                cls = (StationClass.LOW_MEAN_HIGH_VAR if high_var
                       else StationClass.LOW_MEAN_LOW_VAR)
            out[stats[i].station] = cls
    return out


def center_flow(dataset: Dataset, station: int, date: dt.date, slot: int) -> float:
    """Count minus the station's same-date mean across slots."""
    try:
        s = dataset.station_index(station)
        d = dataset.date_index(date)
    except KeyError as e:
        raise MissingKey(f"station or date not in dataset: {e}") from None
    if not (0 <= slot < dataset.n_slots):
        raise MissingKey(f"slot {slot} outside [0, {dataset.n_slots})")
    day = dataset.flow[s, d, :].astype(float)
    return float(day[slot] - day.mean())


def centered_flow_grid(dataset: Dataset) -> np.ndarray:
    """All counts centered per (station, date): shape (S, D, T) float."""
    flow = dataset.flow.astype(float)
    return flow - flow.mean(axis=2, keepdims=True)
