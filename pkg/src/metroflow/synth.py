"""Synthetic dataset generation with fully recorded ground truth.

Flow construction, per station i of class c on day d and slot t:

    base = level_i * (1 + amplitude_i * shape[t]) * day_factor(d)
    flow = round(max(0, base + sum_v effect_v(day_type_d) * z_v[d, t]
                         + noise_scale * eps[i, d, t]))

``shape`` is a fixed double-peak daily curve normalized to zero mean
and unit variance across slots; ``z_v`` are the four weather series
standardized over all cells, so an effect coefficient is the flow
change per standard deviation of that variable, shared by every
station. Weather follows a clipped random walk inside physical bounds
(temperature 15-35, wind 0-60, humidity 40-100, barometer 995-1020);
the rain level derives from humidity/barometer/wind via the documented
ingest heuristic.

Randomness streams (counter-based, see metroflow.rng): weather variable
j walks on derive(derive(seed, 10), j); station level and amplitude
jitters draw from derive(seed, 11); flow noise draws from
derive(seed, 12); the noisy tree benchmark uses derive(seed, 20).
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, WeatherGrid, slots_per_day
from .errors import InvalidConfig
from .ingest import derive_rain, _day_type_codes
from .rng import SplitMix64, derive
from .stations import StationClass

WEATHER_BOUNDS = {
    "temperature": (15.0, 35.0),
    "wind_speed": (0.0, 60.0),
    "humidity": (40.0, 100.0),
    "barometer": (995.0, 1020.0),
}

_CLASS_ORDER = (
    StationClass.HIGH_MEAN_HIGH_VAR,
    StationClass.LOW_MEAN_HIGH_VAR,
    StationClass.HIGH_MEAN_LOW_VAR,
    StationClass.LOW_MEAN_LOW_VAR,
)


@dataclass(frozen=True)
class ClassProfile:
    """Per-class generator parameters.

    ``level`` is the station's mean per-slot flow before day factors;
    jitters spread stations of the class uniformly within +-jitter.
    ``amplitude`` scales the daily shape, so the station's across-slot
    standard deviation is level * amplitude.
    """

    level: float
    amplitude: float
    level_jitter: float = 0.0
    amplitude_jitter: float = 0.0


def _default_profiles():
    return {
        StationClass.HIGH_MEAN_HIGH_VAR: ClassProfile(850.0, 0.80, 40.0, 0.05),
        StationClass.LOW_MEAN_HIGH_VAR: ClassProfile(100.0, 0.90, 5.0, 0.05),
        StationClass.HIGH_MEAN_LOW_VAR: ClassProfile(1000.0, 0.12, 30.0, 0.02),
        StationClass.LOW_MEAN_LOW_VAR: ClassProfile(100.0, 0.25, 0.0, 0.0),
    }


@dataclass(frozen=True)
class SyntheticConfig:
    """Generator settings; defaults plant well-separated quadrants.

    ``class_counts`` lists station counts in dummy order (type 1 =
    high mean/high var, 2 = low/high, 3 = high/low, 4 = low/low).
    Effects are (temperature, wind, humidity, barometer) coefficients
    applied per day type.
    """

    n_stations: int = 100
    n_days: int = 90
    slice_minutes: int = 60
    start_date: dt.date = dt.date(2018, 4, 1)
    class_counts: tuple[int, int, int, int] = (6, 2, 5, 87)
    profiles: dict = field(default_factory=_default_profiles)
    weekend_factor: float = 0.75
    workday_effects: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    weekend_effects: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    noise_scale: float = 0.0
    weather_steps: tuple[float, float, float, float] = (0.6, 3.0, 2.5, 0.8)
    holidays: frozenset = frozenset()
    seed: int = 0

    def __post_init__(self):
        if self.n_days < 15:
            raise InvalidConfig(
                f"n_days must be >= 15 (lag warm-up plus a split), got {self.n_days}"
            )
        if self.n_stations < 1:
            raise InvalidConfig(f"n_stations must be >= 1, got {self.n_stations}")
        if len(self.class_counts) != 4 or any(c < 0 for c in self.class_counts):
            raise InvalidConfig(f"class_counts must be 4 nonnegative ints, got {self.class_counts}")
        if sum(self.class_counts) != self.n_stations:
            raise InvalidConfig(
                f"class_counts {self.class_counts} must sum to n_stations {self.n_stations}"
            )
        for name in ("workday_effects", "weekend_effects"):
            eff = getattr(self, name)
            if len(eff) != 4 or not all(math.isfinite(float(e)) for e in eff):
                raise InvalidConfig(f"{name} must be 4 finite numbers, got {eff}")
        if self.noise_scale < 0:
            raise InvalidConfig(f"noise_scale must be >= 0, got {self.noise_scale}")
        if not (0.0 < self.weekend_factor):
            raise InvalidConfig(f"weekend_factor must be positive, got {self.weekend_factor}")
        slots_per_day(self.slice_minutes)
        for cls in _CLASS_ORDER:
            if cls not in self.profiles:
                raise InvalidConfig(f"profiles missing class {cls.name}")


@dataclass(frozen=True)
class GroundTruth:
    """Everything the generator planted, for verification."""

    classes: dict
    levels: np.ndarray
    amplitudes: np.ndarray
    workday_effects: tuple
    weekend_effects: tuple
    weekend_factor: float
    noise_scale: float
    seed: int


def daily_shape(n_slots: int) -> np.ndarray:
    """Double-peak service-day curve, zero mean and unit variance."""
    t = (np.arange(n_slots) + 0.5) / n_slots
    hour = 6.0 + 17.0 * t
    raw = (np.exp(-(((hour - 8.0) / 1.2) ** 2))
           + 0.9 * np.exp(-(((hour - 18.4) / 1.8) ** 2)))
    centered = raw - raw.mean()
    return centered / centered.std()


def _bounded_walk(stream: SplitMix64, n: int, lo: float, hi: float,
                  step: float) -> np.ndarray:
    steps = stream.normal(size=n) * step
    out = np.empty(n)
    x = (lo + hi) / 2.0
    for i in range(n):
        x = min(max(x + steps[i], lo), hi)
        out[i] = x
    return out


def generate_synthetic(config: SyntheticConfig) -> tuple[Dataset, GroundTruth]:
    """Build a dataset from the config; returns it with its ground truth."""
    S, D = config.n_stations, config.n_days
    T = slots_per_day(config.slice_minutes)
    shape = daily_shape(T)

    classes = {}
    station_ids = np.arange(1, S + 1, dtype=np.int64)
    cursor = 0
    for cls, count in zip(_CLASS_ORDER, config.class_counts):
        for i in range(cursor, cursor + count):
            classes[int(station_ids[i])] = cls
        cursor += count

    jitter = SplitMix64(derive(config.seed, 11))
    u_level = jitter.uniform(size=S)
    u_amp = jitter.uniform(size=S)
    levels = np.empty(S)
    amplitudes = np.empty(S)
    for i, sid in enumerate(station_ids):
        prof = config.profiles[classes[int(sid)]]
        levels[i] = prof.level + (2.0 * u_level[i] - 1.0) * prof.level_jitter
        amplitudes[i] = prof.amplitude + (2.0 * u_amp[i] - 1.0) * prof.amplitude_jitter

    weather_arrays = {}
    for j, (name, (lo, hi)) in enumerate(WEATHER_BOUNDS.items()):
        stream = SplitMix64(derive(derive(config.seed, 10), j))
        walk = _bounded_walk(stream, D * T, lo, hi, config.weather_steps[j])
        weather_arrays[name] = walk.reshape(D, T)

    z = {}
    for name, grid in weather_arrays.items():
        sd = grid.std()
        z[name] = (grid - grid.mean()) / sd if sd > 0 else np.zeros_like(grid)

    day_types = _day_type_codes(config.start_date, D, config.holidays)
    day_factor = np.where(day_types == 1, config.weekend_factor, 1.0)

    effect = np.zeros((D, T))
    for j, name in enumerate(WEATHER_BOUNDS):
        coef = np.where(day_types == 1, config.weekend_effects[j],
                        config.workday_effects[j])
        effect += coef[:, None] * z[name]

    base = (levels[:, None, None]
            * (1.0 + amplitudes[:, None, None] * shape[None, None, :])
            * day_factor[None, :, None])
    values = base + effect[None, :, :]
    if config.noise_scale > 0:
        noise = SplitMix64(derive(config.seed, 12)).normal(size=S * D * T)
        values = values + config.noise_scale * noise.reshape(S, D, T)
    flow = np.rint(np.maximum(values, 0.0)).astype(np.int64)

    rain = np.zeros((D, T), dtype=np.int8)
    hum, baro, wind = (weather_arrays["humidity"], weather_arrays["barometer"],
                       weather_arrays["wind_speed"])
    for d in range(D):
        for t in range(T):
            rain[d, t] = int(derive_rain(hum[d, t], baro[d, t], wind[d, t]))

    dates = np.array(
        [config.start_date + dt.timedelta(days=i) for i in range(D)],
        dtype="datetime64[D]",
    )
    weather = WeatherGrid(
        temperature=weather_arrays["temperature"],
        wind_speed=weather_arrays["wind_speed"],
        humidity=weather_arrays["humidity"],
        barometer=weather_arrays["barometer"],
        rain=rain,
    )
    dataset = Dataset(stations=station_ids, dates=dates,
                      slice_minutes=config.slice_minutes, flow=flow,
                      weather=weather, day_types=day_types)
    truth = GroundTruth(classes=classes, levels=levels, amplitudes=amplitudes,
                        workday_effects=tuple(config.workday_effects),
                        weekend_effects=tuple(config.weekend_effects),
                        weekend_factor=config.weekend_factor,
                        noise_scale=config.noise_scale, seed=config.seed)
    return dataset, truth


def noisy_benchmark(seed: int, n_train: int = 200, n_test: int = 200,
                    noise: float = 1.0):
    """Nonlinear 5-feature benchmark with additive noise.

    y = 10 sin(pi x1 x2) + 20 (x3 - 1/2)^2 + 10 x4 + 5 x5 + noise * eps,
    features uniform on [0, 1]. Returns (X_train, y_train, X_test,
    y_test).
    """
    stream = SplitMix64(derive(seed, 20))
    n = n_train + n_test
    X = stream.uniform(size=n * 5).reshape(n, 5)
    eps = stream.normal(size=n)
    y = (10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
         + 20.0 * (X[:, 2] - 0.5) ** 2
         + 10.0 * X[:, 3] + 5.0 * X[:, 4] + noise * eps)
    return X[:n_train], y[:n_train], X[n_train:], y[n_train:]
