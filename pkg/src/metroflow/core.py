"""Shared domain vocabulary: time slicing, day typing, observations, dataset.

The service day runs 06:00-23:00 (half-open: a record stamped exactly
23:00 is out of window) and is cut into fixed-width slices whose width
must divide 60 minutes. All downstream grids are dense over
(station, date, slot).
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InvalidConfig, OutOfServiceWindow

SERVICE_START_MINUTE = 6 * 60
SERVICE_END_MINUTE = 23 * 60
SERVICE_MINUTES = SERVICE_END_MINUTE - SERVICE_START_MINUTE


class DayType(enum.Enum):
    WORKDAY = "workday"
    WEEKEND = "weekend"


class RainLevel(enum.IntEnum):
    NONE = 0
    MODERATE = 1
    EXTREME = 2


@dataclass(frozen=True, order=True)
class SliceIndex:
    """One time slice of one service day."""

    date: dt.date
    slot: int

    def __str__(self) -> str:
        return f"{self.date.isoformat()}#{self.slot}"


@dataclass(frozen=True)
class FlowObservation:
    date: dt.date
    origin_station: int
    outbound_station: int
    time: dt.time
    count: int


@dataclass(frozen=True)
class WeatherObservation:
    date: dt.date
    time: dt.time
    temperature: float
    wind_speed: float
    humidity: float
    barometer: float
    rain: RainLevel


def slots_per_day(slice_minutes: int) -> int:
    """Number of slices in one service day."""
    if slice_minutes <= 0 or 60 % slice_minutes != 0:
        raise InvalidConfig(f"slice width {slice_minutes} must be a positive divisor of 60")
    return SERVICE_MINUTES // slice_minutes


def slice_of(date: dt.date, clock_time: dt.time, slice_minutes: int) -> SliceIndex:
    """Map a clock time to its slice; raises OutOfServiceWindow outside 06:00-23:00."""
    n_slots = slots_per_day(slice_minutes)
    minute = clock_time.hour * 60 + clock_time.minute
    if minute < SERVICE_START_MINUTE or minute >= SERVICE_END_MINUTE:
        raise OutOfServiceWindow(
            f"{clock_time.strftime('%H:%M')} outside service window 06:00-23:00"
        )
    slot = (minute - SERVICE_START_MINUTE) // slice_minutes
    assert 0 <= slot < n_slots
    return SliceIndex(date, slot)


def slot_start(slot: int, slice_minutes: int) -> dt.time:
    """Clock time at which a slot begins."""
    minute = SERVICE_START_MINUTE + slot * slice_minutes
    return dt.time(minute // 60, minute % 60)


def day_type(date: dt.date, holidays: frozenset[dt.date] = frozenset()) -> DayType:
    """Weekend iff Saturday, Sunday, or a listed public holiday."""
    if date.weekday() >= 5 or date in holidays:
        return DayType.WEEKEND
    return DayType.WORKDAY


def load_holidays(path) -> frozenset[dt.date]:
    """Read a holiday calendar: one ISO date per line, '#' comments allowed."""
    dates = set()
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                dates.add(dt.date.fromisoformat(line))
    return frozenset(dates)


def default_holidays() -> frozenset[dt.date]:
    """The packaged Hong Kong public holiday calendar for Apr-Jun 2018."""
    text = resources.files("metroflow.data").joinpath("holidays_hk_2018.txt").read_text()
    dates = set()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            dates.add(dt.date.fromisoformat(line))
    return frozenset(dates)


@dataclass(frozen=True)
class WeatherGrid:
    """Per-slice averaged weather over a dense (date, slot) grid."""

    temperature: np.ndarray  # (D, T) float64
    wind_speed: np.ndarray
    humidity: np.ndarray
    barometer: np.ndarray
    rain: np.ndarray  # (D, T) int8, values 0/1/2

    def __post_init__(self):
        for arr in (self.temperature, self.wind_speed, self.humidity, self.barometer, self.rain):
            arr.setflags(write=False)

    @property
    def shape(self):
        return self.temperature.shape

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)


WEATHER_VARIABLES = ("temperature", "wind_speed", "humidity", "barometer")


@dataclass(frozen=True)
class Dataset:
    """Aligned per-station outbound counts with per-slice weather and day types.

    The flow grid is dense: every (station, date, slot) cell exists,
    zero-filled where the source had no record. Dates are consecutive
    calendar days; slots cover the full service window.
    """

    stations: np.ndarray  # (S,) int64, sorted
    dates: np.ndarray  # (D,) datetime64[D], consecutive
    slice_minutes: int
    flow: np.ndarray  # (S, D, T) int64
    weather: WeatherGrid
    day_types: np.ndarray  # (D,) uint8; 0 workday, 1 weekend

    def __post_init__(self):
        n_slots = slots_per_day(self.slice_minutes)
        s, d, t = self.flow.shape
        if s != len(self.stations) or d != len(self.dates) or t != n_slots:
            raise InvalidConfig("flow grid shape does not match stations/dates/slots")
        if self.weather.shape != (d, t):
            raise InvalidConfig("weather grid shape does not match dates/slots")
        if len(self.day_types) != d:
            raise InvalidConfig("day_types length does not match dates")
        for arr in (self.stations, self.dates, self.flow, self.day_types):
            arr.setflags(write=False)

    @property
    def n_slots(self) -> int:
        return self.flow.shape[2]

    @property
    def slices(self) -> list[SliceIndex]:
        """All slices in chronological order."""
        out = []
        for d in self.dates:
            pydate = d.astype("datetime64[D]").astype(dt.date)
            out.extend(SliceIndex(pydate, t) for t in range(self.n_slots))
        return out

    def date_index(self, date: dt.date) -> int:
        idx = np.searchsorted(self.dates, np.datetime64(date, "D"))
        if idx >= len(self.dates) or self.dates[idx] != np.datetime64(date, "D"):
            raise KeyError(date)
        return int(idx)

    def station_index(self, station: int) -> int:
        idx = np.searchsorted(self.stations, station)
        if idx >= len(self.stations) or self.stations[idx] != station:
            raise KeyError(station)
        return int(idx)

    def day_type_of(self, date: dt.date) -> DayType:
        return DayType.WEEKEND if self.day_types[self.date_index(date)] else DayType.WORKDAY

    def date_mask(self, day_filter: DayType | None) -> np.ndarray:
        """Boolean mask over dates matching the filter (None keeps all)."""
        if day_filter is None:
            return np.ones(len(self.dates), dtype=bool)
        want = 1 if day_filter is DayType.WEEKEND else 0
        return self.day_types == want

    def total_flow(self) -> int:
        return int(self.flow.sum())
