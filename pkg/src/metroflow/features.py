"""Design-matrix assembly: lags, class dummies, masked weather, splits.

Full column order (mask all on):

    lag_1 .. lag_7, station_type_1 .. station_type_4,
    temperature, wind_speed, humidity, barometer, rain, slot

Weather columns drop out of the matrix entirely when masked off; the
rain dummy (raw 0/1/2) and the slot index always stay. Lags are the
same slot 1..7 calendar days earlier regardless of day type; rows for
the first seven dates are dropped and counted. Rows are ordered by
station, then date, then slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .core import Dataset, DayType, WEATHER_VARIABLES
from .errors import (
    DegenerateSplit,
    EmptySelection,
    InsufficientHistory,
    InvalidConfig,
    MissingKey,
    WidthMismatch,
)
from .rng import SplitMix64, derive
from .stations import StationClass, _DUMMY_ORDER

N_LAGS = 7
LAG_COLUMNS = tuple(f"lag_{k}" for k in range(1, N_LAGS + 1))
DUMMY_COLUMNS = tuple(f"station_type_{i}" for i in range(1, 5))
SPLIT_STREAM = 3


@dataclass(frozen=True)
class FeatureMask:
    """Selection over the four continuous weather variables.

    Canonical index counts in binary over (temperature, wind, humidity,
    barometer) with barometer as the least significant bit, so index 0
    is the no-weather baseline and index 15 selects everything.
    """

    temperature: bool = False
    wind: bool = False
    humidity: bool = False
    barometer: bool = False

    @property
    def index(self) -> int:
        return ((self.temperature << 3) | (self.wind << 2)
                | (self.humidity << 1) | int(self.barometer))

    @classmethod
    def from_index(cls, i: int) -> "FeatureMask":
        if not (0 <= i < 16):
            raise InvalidConfig(f"mask index must be in [0, 16), got {i}")
        return cls(temperature=bool(i & 8), wind=bool(i & 4),
                   humidity=bool(i & 2), barometer=bool(i & 1))

    @classmethod
    def all_on(cls) -> "FeatureMask":
        return cls(True, True, True, True)

    def flags(self) -> tuple[int, int, int, int]:
        return (int(self.temperature), int(self.wind),
                int(self.humidity), int(self.barometer))

    def selected(self) -> tuple[str, ...]:
        """Included weather column names, in canonical weather order."""
        picked = []
        for name, on in zip(WEATHER_VARIABLES,
                            (self.temperature, self.wind, self.humidity,
                             self.barometer)):
            if on:
                picked.append(name)
        return tuple(picked)


def feature_columns(mask: FeatureMask) -> tuple[str, ...]:
    """Design-matrix column names for one mask."""
    return LAG_COLUMNS + DUMMY_COLUMNS + mask.selected() + ("rain", "slot")


class ZScoreScaler(TransformerMixin, BaseEstimator):
    """Column z-scoring with population (n-denominator) statistics.

    Only the columns named at construction are scaled; the rest pass
    through untouched. Scaled columns with zero variance are flagged in
    ``constant_columns_`` and passed through unchanged.

    Parameters
    ----------
    columns : sequence of int or None, default None
        Indices of the columns to scale; None scales all.

    Attributes
    ----------
    n_features_in_ : int
    mean_, scale_ : ndarray of shape (n_features_in_,)
        Identity values (0, 1) for unscaled and constant columns.
    constant_columns_ : tuple of int
    """

    def __init__(self, columns=None):
        self.columns = columns

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
        if X.shape[0] == 0:
            raise EmptySelection("cannot fit a scaler on zero rows")
        p = X.shape[1]
        cols = list(range(p)) if self.columns is None else [int(c) for c in self.columns]
        if any(c < 0 or c >= p for c in cols):
            raise InvalidConfig(f"scaler columns {cols} out of range for width {p}")
        self.n_features_in_ = p
        self.mean_ = np.zeros(p)
        self.scale_ = np.ones(p)
        constant = []
        for c in cols:
            mu = float(X[:, c].mean())
            sd = float(X[:, c].std())
            if sd == 0.0:
                constant.append(c)
            else:
                self.mean_[c] = mu
                self.scale_[c] = sd
        self.constant_columns_ = tuple(constant)
        return self

    def transform(self, X):
        if not hasattr(self, "n_features_in_"):
            raise NotFittedError("this ZScoreScaler instance is not fitted yet")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
        if X.shape[1] != self.n_features_in_:
            raise WidthMismatch(self.n_features_in_, X.shape[1])
        return (X - self.mean_) / self.scale_

    def inverse_transform(self, X):
        X = np.asarray(X, dtype=float)
        return X * self.scale_ + self.mean_


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric rows with provenance.

    Row keys (station, date, slot) are unique; ``weekend`` tags each
    row's day type; ``n_dropped_rows`` counts rows lost to the 7-day
    lag warm-up during assembly.
    """

    X: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...]
    stations: np.ndarray
    dates: np.ndarray
    slots: np.ndarray
    weekend: np.ndarray
    n_dropped_rows: int

    def __post_init__(self):
        for a in (self.X, self.y, self.stations, self.dates, self.slots,
                  self.weekend):
            a.setflags(write=False)
        if self.X.shape != (len(self.y), len(self.columns)):
            raise InvalidConfig("design matrix shape does not match labels")

    @property
    def n_rows(self) -> int:
        return len(self.y)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise MissingKey(f"no column named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.column_index(name)]

    def select_columns(self, names) -> "DesignMatrix":
        idx = [self.column_index(n) for n in names]
        return replace(self, X=np.ascontiguousarray(self.X[:, idx]),
                       columns=tuple(names))

    def with_X(self, X: np.ndarray) -> "DesignMatrix":
        return replace(self, X=np.ascontiguousarray(X))

    def take(self, rows: np.ndarray) -> "DesignMatrix":
        return replace(
            self,
            X=np.ascontiguousarray(self.X[rows]),
            y=self.y[rows].copy(),
            stations=self.stations[rows].copy(),
            dates=self.dates[rows].copy(),
            slots=self.slots[rows].copy(),
            weekend=self.weekend[rows].copy(),
        )

    def weather_column_indices(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.columns)
                     if c in WEATHER_VARIABLES)


def assemble(dataset: Dataset, classes: dict[int, StationClass],
             mask: FeatureMask = FeatureMask.all_on(),
             day_filter: DayType | None = None) -> DesignMatrix:
    """Build the (unscaled) design matrix for one mask and day filter.

    Lags always come from the full calendar regardless of the day
    filter, which only selects the target rows.
    """
    S, D, T = dataset.flow.shape
    if D <= N_LAGS:
        raise InsufficientHistory(
            f"need more than {N_LAGS} days of history, got {D}"
        )
    for s in dataset.stations:
        if int(s) not in classes:
            raise MissingKey(f"no class for station {int(s)}")

    date_ok = dataset.date_mask(day_filter)
    eligible = np.arange(D) >= N_LAGS
    sel = np.flatnonzero(date_ok & eligible)
    n_dropped = int(np.count_nonzero(date_ok & ~eligible)) * S * T
    if len(sel) == 0:
        raise EmptySelection("no dates remain after lag warm-up and day filter")

    flow = dataset.flow.astype(float)
    n_sel = len(sel)
    cols: list[np.ndarray] = []
    names: list[str] = []

    for k in range(1, N_LAGS + 1):
        cols.append(flow[:, sel - k, :].reshape(-1))
        names.append(f"lag_{k}")

    onehot = np.zeros((S, 4))
    for i, s in enumerate(dataset.stations):
        onehot[i, classes[int(s)].dummy_index] = 1.0
    per_station = n_sel * T
    for j, name in enumerate(DUMMY_COLUMNS):
        cols.append(np.repeat(onehot[:, j], per_station))
        names.append(name)

    for name in mask.selected():
        grid = dataset.weather.column(name)[sel, :]
        cols.append(np.tile(grid.reshape(-1), S))
        names.append(name)

    rain = dataset.weather.rain[sel, :].astype(float)
    cols.append(np.tile(rain.reshape(-1), S))
    names.append("rain")
    cols.append(np.tile(np.arange(T, dtype=float), S * n_sel))
    names.append("slot")

    X = np.ascontiguousarray(np.column_stack(cols))
    y = flow[:, sel, :].reshape(-1)
    stations_r = np.repeat(dataset.stations.astype(np.int64), per_station)
    dates_r = np.tile(np.repeat(dataset.dates[sel], T), S)
    slots_r = np.tile(np.arange(T, dtype=np.int64), S * n_sel)
    weekend_r = np.tile(np.repeat(dataset.day_types[sel] == 1, T), S)

    return DesignMatrix(X=X, y=y, columns=tuple(names), stations=stations_r,
                        dates=dates_r, slots=slots_r, weekend=weekend_r,
                        n_dropped_rows=n_dropped)


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split policy.

    Chronological mode sends the first ``ceil(train_fraction * n_dates)``
    distinct dates (clamped so neither side is empty) to training;
    seeded-random mode shuffles rows with the stream
    ``derive(seed, 3)``.
    """

    train_fraction: float = 0.7
    mode: str = "chronological"
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise InvalidConfig(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )
        if self.mode not in ("chronological", "random"):
            raise InvalidConfig(f"unknown split mode {self.mode!r}")


def split(matrix: DesignMatrix, spec: SplitSpec = SplitSpec()
          ) -> tuple[DesignMatrix, DesignMatrix]:
    """Partition rows into train and test per the split policy.

    In chronological mode every training date strictly precedes every
    test date. In random mode the row order within each side stays
    canonical (indices re-sorted after the shuffle).
    """
    if matrix.n_rows == 0:
        raise DegenerateSplit("cannot split an empty matrix")
    if spec.mode == "chronological":
        dates = np.unique(matrix.dates)
        if len(dates) < 2:
            raise DegenerateSplit("need at least 2 distinct dates to split")
        n_train = math.ceil(spec.train_fraction * len(dates))
        n_train = min(max(n_train, 1), len(dates) - 1)
        cutoff = dates[n_train]
        train_rows = np.flatnonzero(matrix.dates < cutoff)
        test_rows = np.flatnonzero(matrix.dates >= cutoff)
    else:
        n = matrix.n_rows
        if n < 2:
            raise DegenerateSplit("need at least 2 rows to split")
        n_train = math.ceil(spec.train_fraction * n)
        n_train = min(max(n_train, 1), n - 1)
        perm = SplitMix64(derive(spec.seed, SPLIT_STREAM)).permutation(n)
        train_rows = np.sort(perm[:n_train])
        test_rows = np.sort(perm[n_train:])
    return matrix.take(train_rows), matrix.take(test_rows)
