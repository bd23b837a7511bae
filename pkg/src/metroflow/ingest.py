"""CSV parsing and alignment of sub-slice weather onto the slice grid.

Sources may be a filesystem path (str or Path), raw bytes, or a text
file object. Line numbers in errors are 1-based and include the header
line. Dates are accepted in both ``2018-04-01`` and ``2018/4/1`` form;
clock times as ``H:MM`` or ``HH:MM`` with optional seconds.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    Dataset,
    DayType,
    FlowObservation,
    RainLevel,
    SERVICE_END_MINUTE,
    SERVICE_START_MINUTE,
    SliceIndex,
    WeatherGrid,
    WeatherObservation,
    day_type,
    load_holidays,
    slice_of,
    slots_per_day,
)
from .errors import (
    CoverageGap,
    EmptyInput,
    HumidityOutOfRange,
    InvalidConfig,
    ParseError,
)

_NUMERIC_FIELDS = ("temperature", "wind_speed", "humidity", "barometer")


@dataclass(frozen=True)
class SliceWeather:
    """Averaged weather for one time slice (rain is the slice maximum)."""

    temperature: float
    wind_speed: float
    humidity: float
    barometer: float
    rain: int


@dataclass(frozen=True)
class ParseResult:
    """Parsed records plus the skip accounting when on_error='skip'."""

    records: tuple
    n_skipped: int
    errors: tuple

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def _text_lines(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    return source


def _parse_date(text: str) -> dt.date:
    text = text.strip()
    for sep in ("-", "/"):
        parts = text.split(sep)
        if len(parts) == 3:
            return dt.date(int(parts[0]), int(parts[1]), int(parts[2]))
    raise ValueError(f"unrecognized date {text!r}")


def _parse_time(text: str) -> dt.time:
    parts = text.strip().split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"unrecognized time {text!r}")
    hour, minute = int(parts[0]), int(parts[1])
    second = int(parts[2]) if len(parts) == 3 else 0
    return dt.time(hour, minute, second)


def _in_service_window(t: dt.time) -> bool:
    minute = t.hour * 60 + t.minute
    return SERVICE_START_MINUTE <= minute < SERVICE_END_MINUTE


def _parse_rows(source, n_fields, row_parser, on_error):
    if on_error not in ("abort", "skip"):
        raise InvalidConfig(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    records, errors = [], []
    fh = _text_lines(source)
    try:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 or not row:
                continue
            try:
                if len(row) not in n_fields:
                    raise ParseError(
                        lineno, "row",
                        f"expected {' or '.join(map(str, sorted(n_fields)))} "
                        f"fields, got {len(row)}",
                    )
                records.append(row_parser(lineno, [f.strip() for f in row]))
            except ParseError as e:
                if on_error == "abort":
                    raise
                errors.append(e)
    finally:
        if isinstance(source, (str, Path, bytes)):
            fh.close()
    return ParseResult(records=tuple(records), n_skipped=len(errors),
                       errors=tuple(errors))


def _flow_row(lineno: int, row: list[str]) -> FlowObservation:
    def fail(column, reason):
        raise ParseError(lineno, column, reason)

    try:
        date = _parse_date(row[0])
    except ValueError as e:
        fail("date", str(e))
    for column, text in (("origin", row[1]), ("outbound", row[2])):
        try:
            if int(text) < 0:
                fail(column, f"negative station id {text}")
        except ValueError:
            fail(column, f"not an integer: {text!r}")
    try:
        time = _parse_time(row[3])
    except ValueError as e:
        fail("time", str(e))
    if not _in_service_window(time):
        fail("time", f"{row[3]} outside service window 06:00-23:00")
    try:
        count = int(row[4])
    except ValueError:
        fail("count", f"not an integer: {row[4]!r}")
    if count < 0:
        fail("count", f"negative count {count}")
    return FlowObservation(date=date, origin_station=int(row[1]),
                           outbound_station=int(row[2]), time=time, count=count)


def parse_flow_csv(source, on_error: str = "abort") -> ParseResult:
    """Parse passenger-flow rows: date, origin, outbound, time, count."""
    return _parse_rows(source, {5}, _flow_row, on_error)


def derive_rain(humidity: float, barometer: float, wind_speed: float) -> RainLevel:
    """Heuristic rain level when the source has no rain column.

    Moderate rain when humidity >= 95 and barometer <= 1005 (pressure
    drops during precipitation); extreme when the wind also reaches
    30 km/h. A documented approximation, not ground truth.
    """
    if humidity >= 95.0 and barometer <= 1005.0:
        return RainLevel.EXTREME if wind_speed >= 30.0 else RainLevel.MODERATE
    return RainLevel.NONE


def _weather_row(lineno: int, row: list[str]) -> WeatherObservation:
    def fail(column, reason):
        raise ParseError(lineno, column, reason)

    try:
        date = _parse_date(row[0])
    except ValueError as e:
        fail("date", str(e))
    try:
        time = _parse_time(row[1])
    except ValueError as e:
        fail("time", str(e))
    values = {}
    for column, text in zip(_NUMERIC_FIELDS, row[2:6]):
        try:
            values[column] = float(text)
        except ValueError:
            fail(column, f"not a number: {text!r}")
    if not (0.0 <= values["humidity"] <= 100.0):
        raise HumidityOutOfRange(lineno, values["humidity"])
    if values["wind_speed"] < 0:
        fail("wind_speed", f"negative wind speed {values['wind_speed']}")
    if values["barometer"] <= 0:
        fail("barometer", f"non-positive barometer {values['barometer']}")
    if len(row) == 7:
        try:
            rain_value = int(row[6])
        except ValueError:
            fail("rain", f"not an integer: {row[6]!r}")
        if rain_value not in (0, 1, 2):
            fail("rain", f"rain level must be 0, 1, or 2, got {rain_value}")
        rain = RainLevel(rain_value)
    else:
        rain = derive_rain(values["humidity"], values["barometer"],
                           values["wind_speed"])
    return WeatherObservation(date=date, time=time, rain=rain, **values)


def parse_weather_csv(source, on_error: str = "abort") -> ParseResult:
    """Parse weather rows: date, time, temp, wind, humidity, barometer[, rain]."""
    return _parse_rows(source, {6, 7}, _weather_row, on_error)


def align_weather(observations, slice_minutes: int, gap_fill: bool = False,
                  ) -> dict[SliceIndex, SliceWeather]:
    """Average sub-slice observations onto the slice grid.

    Numeric fields take the arithmetic mean of the observations whose
    timestamps fall inside the slice; rain takes the maximum. The grid
    spans every calendar day from the first to the last observation.
    With ``gap_fill`` enabled, runs of at most 2 empty slices between
    covered ones are filled by linear interpolation (rain: maximum of
    the bracketing slices); anything longer, or a gap at either end,
    raises CoverageGap.
    """
    obs = [o for o in observations if _in_service_window(o.time)]
    if not obs:
        raise EmptyInput("no weather observations inside the service window")
    T = slots_per_day(slice_minutes)
    first = min(o.date for o in obs)
    last = max(o.date for o in obs)
    D = (last - first).days + 1

    sums = np.zeros((4, D * T))
    counts = np.zeros(D * T, dtype=np.int64)
    rain = np.zeros(D * T, dtype=np.int64)
    for o in obs:
        d = (o.date - first).days
        slot = slice_of(o.date, o.time, slice_minutes).slot
        i = d * T + slot
        sums[0, i] += o.temperature
        sums[1, i] += o.wind_speed
        sums[2, i] += o.humidity
        sums[3, i] += o.barometer
        counts[i] += 1
        rain[i] = max(rain[i], int(o.rain))

    covered = counts > 0
    values = np.full((4, D * T), np.nan)
    values[:, covered] = sums[:, covered] / counts[covered]

    if not covered.all():
        missing = np.flatnonzero(~covered)
        def slice_at(i):
            return SliceIndex(first + dt.timedelta(days=int(i) // T), int(i) % T)
        if not gap_fill:
            raise CoverageGap([slice_at(i) for i in missing])
        unfillable = []
        runs = np.split(missing, np.flatnonzero(np.diff(missing) > 1) + 1)
        for run in runs:
            lo, hi = int(run[0]) - 1, int(run[-1]) + 1
            if len(run) > 2 or lo < 0 or hi >= D * T:
                unfillable.extend(run)
                continue
            for i in run:
                w = (i - lo) / (hi - lo)
                values[:, i] = (1 - w) * values[:, lo] + w * values[:, hi]
                rain[i] = max(rain[lo], rain[hi])
        if unfillable:
            raise CoverageGap([slice_at(i) for i in unfillable])

    out = {}
    for i in range(D * T):
        key = SliceIndex(first + dt.timedelta(days=i // T), i % T)
        out[key] = SliceWeather(
            temperature=float(values[0, i]), wind_speed=float(values[1, i]),
            humidity=float(values[2, i]), barometer=float(values[3, i]),
            rain=int(rain[i]),
        )
    return out


def build_dataset(flows, weather_by_slice, holidays: frozenset = frozenset(),
                  slice_minutes: int = 60) -> Dataset:
    """Pivot flow observations onto the dense per-station grid.

    Counts sum over origins into (outbound_station, date, slot) cells,
    zero-filled where no record exists. The aligned weather must cover
    every slice the flow dates span.
    """
    flows = list(flows)
    if not flows:
        raise EmptyInput("no flow observations")
    T = slots_per_day(slice_minutes)
    stations = np.array(sorted({o.outbound_station for o in flows}), dtype=np.int64)
    first = min(o.date for o in flows)
    last = max(o.date for o in flows)
    D = (last - first).days + 1
    dates = np.array([first + dt.timedelta(days=i) for i in range(D)],
                     dtype="datetime64[D]")

    grid = np.zeros((len(stations), D, T), dtype=np.int64)
    s_idx = np.searchsorted(stations, np.array([o.outbound_station for o in flows]))
    d_idx = np.array([(o.date - first).days for o in flows])
    t_idx = np.array([slice_of(o.date, o.time, slice_minutes).slot for o in flows])
    np.add.at(grid, (s_idx, d_idx, t_idx),
              np.array([o.count for o in flows], dtype=np.int64))

    missing = []
    arrays = {name: np.zeros((D, T)) for name in _NUMERIC_FIELDS}
    rain = np.zeros((D, T), dtype=np.int8)
    for d in range(D):
        date = first + dt.timedelta(days=d)
        for t in range(T):
            w = weather_by_slice.get(SliceIndex(date, t))
            if w is None:
                missing.append(SliceIndex(date, t))
                continue
            for name in _NUMERIC_FIELDS:
                arrays[name][d, t] = getattr(w, name)
            rain[d, t] = w.rain
    if missing:
        raise CoverageGap(missing)

    day_types = _day_type_codes(first, D, holidays)
    weather = WeatherGrid(temperature=arrays["temperature"],
                          wind_speed=arrays["wind_speed"],
                          humidity=arrays["humidity"],
                          barometer=arrays["barometer"], rain=rain)
    return Dataset(stations=stations, dates=dates, slice_minutes=slice_minutes,
                   flow=grid, weather=weather, day_types=day_types)


def _day_type_codes(first: dt.date, n_days: int, holidays) -> np.ndarray:
    return np.array(
        [1 if day_type(first + dt.timedelta(days=i), holidays) is DayType.WEEKEND
         else 0 for i in range(n_days)],
        dtype=np.uint8,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def save_dataset(dataset: Dataset, out_dir, extra_meta: dict | None = None) -> list[str]:
    """Write the canonical serialization; returns the file names written.

    Files: ``flow.csv`` (station,date,slot,count; every cell, zeros
    included), ``weather.csv`` (date,slot,temp,wind,humidity,barometer,
    rain), ``holidays.txt`` (weekend-typed non-Sat/Sun dates), and
    ``meta.json``. Floats use the shortest round-trip representation,
    so load_dataset reproduces the dataset exactly.
    """
    out_dir = Path(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    S, D, T = dataset.flow.shape
    date_strs = [str(d) for d in dataset.dates]

    lines = ["station,date,slot,count"]
    for i, s in enumerate(dataset.stations):
        for d in range(D):
            base = f"{int(s)},{date_strs[d]},"
            row = dataset.flow[i, d]
            lines.extend(f"{base}{t},{int(row[t])}" for t in range(T))
    (out_dir / "flow.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    w = dataset.weather
    lines = ["date,slot,temp,wind,humidity,barometer,rain"]
    for d in range(D):
        for t in range(T):
            lines.append(
                f"{date_strs[d]},{t},{_fmt(w.temperature[d, t])},"
                f"{_fmt(w.wind_speed[d, t])},{_fmt(w.humidity[d, t])},"
                f"{_fmt(w.barometer[d, t])},{int(w.rain[d, t])}"
            )
    (out_dir / "weather.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    holiday_lines = [
        date_strs[d] for d in range(D)
        if dataset.day_types[d] == 1
        and dataset.dates[d].astype("datetime64[D]").astype(dt.date).weekday() < 5
    ]
    (out_dir / "holidays.txt").write_text(
        "".join(line + "\n" for line in holiday_lines), encoding="utf-8")

    meta = {
        "slice_minutes": dataset.slice_minutes,
        "n_stations": S,
        "n_days": D,
        "start_date": date_strs[0],
        "total_flow": dataset.total_flow(),
    }
    if extra_meta:
        meta.update(extra_meta)
    (out_dir / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return ["flow.csv", "weather.csv", "holidays.txt", "meta.json"]


def load_dataset(data_dir) -> Dataset:
    """Read a canonical dataset directory back into memory."""
    data_dir = Path(data_dir)
    meta = json.loads((data_dir / "meta.json").read_text(encoding="utf-8"))
    slice_minutes = int(meta["slice_minutes"])
    T = slots_per_day(slice_minutes)

    stations_set = set()
    cells = []
    with open(data_dir / "flow.csv", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if not row:
                continue
            s, date, slot, count = int(row[0]), _parse_date(row[1]), int(row[2]), int(row[3])
            stations_set.add(s)
            cells.append((s, date, slot, count))
    if not cells:
        raise EmptyInput("flow.csv has no rows")
    stations = np.array(sorted(stations_set), dtype=np.int64)
    first = min(c[1] for c in cells)
    last = max(c[1] for c in cells)
    D = (last - first).days + 1
    dates = np.array([first + dt.timedelta(days=i) for i in range(D)],
                     dtype="datetime64[D]")
    grid = np.zeros((len(stations), D, T), dtype=np.int64)
    for s, date, slot, count in cells:
        grid[np.searchsorted(stations, s), (date - first).days, slot] += count

    arrays = {name: np.full((D, T), np.nan) for name in _NUMERIC_FIELDS}
    rain = np.zeros((D, T), dtype=np.int8)
    seen = np.zeros((D, T), dtype=bool)
    with open(data_dir / "weather.csv", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if not row:
                continue
            date, slot = _parse_date(row[0]), int(row[1])
            d = (date - first).days
            if not (0 <= d < D):
                continue
            for j, name in enumerate(_NUMERIC_FIELDS):
                arrays[name][d, slot] = float(row[2 + j])
            rain[d, slot] = int(row[6])
            seen[d, slot] = True
    if not seen.all():
        gaps = [SliceIndex(first + dt.timedelta(days=int(d)), int(t))
                for d, t in zip(*np.nonzero(~seen))]
        raise CoverageGap(gaps)

    holidays_path = data_dir / "holidays.txt"
    holidays = load_holidays(holidays_path) if holidays_path.exists() else frozenset()
    day_types = _day_type_codes(first, D, holidays)
    weather = WeatherGrid(temperature=arrays["temperature"],
                          wind_speed=arrays["wind_speed"],
                          humidity=arrays["humidity"],
                          barometer=arrays["barometer"], rain=rain)
    return Dataset(stations=stations, dates=dates, slice_minutes=slice_minutes,
                   flow=grid, weather=weather, day_types=day_types)
