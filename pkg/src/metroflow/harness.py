"""Experiment drivers: weather ablation, model bakeoff, slot regression.

Every driver follows the same recipe: assemble the design matrix once
with all weather columns, split it, fit one z-scaler on the training
weather columns, and let the scenario vary only the requested knob
(weather mask, model kind, station subset). Model seeds are identical
across masks of one ablation, so bootstrap index streams match and the
rows differ only through the available columns.

Row order inside a report is deterministic; reruns with the same
dataset, settings, and seed reproduce reports exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .core import Dataset, DayType, WEATHER_VARIABLES
from .errors import MetroflowError, TooFewObservations
from .features import (
    DesignMatrix,
    FeatureMask,
    SplitSpec,
    ZScoreScaler,
    assemble,
    feature_columns,
    split,
)
from .models import BaggingEnsemble, MlpRegressor, RandomForest
from .stations import StationClass, centered_flow_grid
from .stats import CorrelationTable, Metrics, OlsFit, correlation_table, metrics, ols_fit

CORRELATION_ROW_ORDER = (
    "station_type_1", "station_type_2", "station_type_3", "station_type_4",
    "temperature", "wind_speed", "humidity", "barometer",
    "lag_1", "lag_2", "lag_3", "lag_4", "lag_5", "lag_6", "lag_7",
)

REGRESSION_VARIABLES = ("humidity", "temperature", "barometer", "rain")


def enumerate_masks() -> list[FeatureMask]:
    """All 16 weather masks in canonical order, no-weather first."""
    return [FeatureMask.from_index(i) for i in range(16)]


@dataclass(frozen=True)
class EnsembleSettings:
    """Tree-ensemble knobs shared by ablation and bakeoff runs."""

    n_estimators: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    min_impurity_decrease: float = 0.0
    bootstrap_size: float = 1.0
    feature_subsample: float = 1.0 / 3.0

    def build(self, kind: str, seed: int):
        common = dict(
            n_estimators=self.n_estimators,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            min_impurity_decrease=self.min_impurity_decrease,
            bootstrap_size=self.bootstrap_size,
            seed=seed,
        )
        if kind == "bagging":
            return BaggingEnsemble(**common)
        if kind == "random_forest":
            return RandomForest(feature_subsample=self.feature_subsample, **common)
        raise ValueError(f"unknown ensemble kind {kind!r}")


@dataclass(frozen=True)
class MlpSettings:
    """Network knobs for the bakeoff's neural row."""

    hidden_layers: tuple[int, ...] = (64,)
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 32

    def build(self, seed: int) -> MlpRegressor:
        return MlpRegressor(hidden_layers=self.hidden_layers,
                            learning_rate=self.learning_rate,
                            epochs=self.epochs,
                            batch_size=self.batch_size, seed=seed)


@dataclass(frozen=True)
class AblationRow:
    """One mask's held-out errors, or the error that stopped it."""

    mask: FeatureMask
    mae: float | None
    mse: float | None
    rmse: float | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class AblationReport:
    """All 16 mask rows sorted by test MSE, failed rows last."""

    rows: tuple[AblationRow, ...]
    model: str
    day_filter: DayType | None
    seed: int
    n_train: int
    n_test: int
    n_dropped_rows: int
    settings: EnsembleSettings

    def row_for(self, mask: FeatureMask) -> AblationRow:
        for row in self.rows:
            if row.mask == mask:
                return row
        raise KeyError(mask)

    @property
    def best(self) -> AblationRow:
        return self.rows[0]


def _prepare(dataset: Dataset, classes: dict[int, StationClass],
             day_filter: DayType | None, split_spec: SplitSpec,
             station: int | None = None,
             ) -> tuple[DesignMatrix, DesignMatrix, DesignMatrix]:
    """Assemble all-weather matrix, restrict, split, scale weather columns."""
    full = assemble(dataset, classes, mask=FeatureMask.all_on(),
                    day_filter=day_filter)
    if station is not None:
        rows = np.flatnonzero(full.stations == station)
        if rows.size == 0:
            raise TooFewObservations(f"station {station} has no usable rows")
        full = full.take(rows)
    train, test = split(full, split_spec)
    scaler = ZScoreScaler(columns=full.weather_column_indices())
    scaler.fit(train.X)
    return (full,
            train.with_X(scaler.transform(train.X)),
            test.with_X(scaler.transform(test.X)))


def _fit_one_mask(args):
    """Fit and score one mask; module-level so process pools can pickle it."""
    (index, X_train, y_train, X_test, y_test, kind, settings, seed) = args
    try:
        model = settings.build(kind, seed)
        model.fit(X_train, y_train)
        m = metrics(y_test, model.predict(X_test))
        return (index, m.mae, m.mse, m.rmse, None)
    except MetroflowError as e:
        return (index, None, None, None,
                f"mask {index}: {type(e).__name__}: {e}")


def run_ablation(dataset: Dataset, classes: dict[int, StationClass],
                 day_filter: DayType | None = None,
                 split_spec: SplitSpec = SplitSpec(),
                 settings: EnsembleSettings = EnsembleSettings(),
                 seed: int = 0, model: str = "bagging",
                 station: int | None = None, jobs: int = 1) -> AblationReport:
    """Fit one model per weather mask on a shared split and rank the rows.

    The design matrix is assembled once with every weather column,
    scaled on the training side, then sliced per mask, so all 16 fits
    see identical rows, lag values, and bootstrap streams. ``station``
    restricts the study to one station's rows (pooled over all stations
    otherwise). Rows sort by ascending test MSE with the mask index as
    the tie-break; rows that failed sort last and carry the error.
    """
    if model not in ("bagging", "random_forest"):
        raise ValueError(f"unknown ensemble kind {model!r}")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    full, train, test = _prepare(dataset, classes, day_filter, split_spec,
                                 station=station)
    tasks = []
    for mask in enumerate_masks():
        cols = feature_columns(mask)
        tr = train.select_columns(cols)
        te = test.select_columns(cols)
        tasks.append((mask.index, tr.X, tr.y, te.X, te.y, model, settings, seed))

    if jobs == 1:
        results = [_fit_one_mask(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fit_one_mask, tasks))

    rows = [AblationRow(mask=FeatureMask.from_index(i), mae=mae, mse=mse,
                        rmse=rmse, error=err)
            for (i, mae, mse, rmse, err) in results]
    rows.sort(key=lambda r: (r.error is not None,
                             r.mse if r.mse is not None else math.inf,
                             r.mask.index))
    return AblationReport(rows=tuple(rows), model=model, day_filter=day_filter,
                          seed=seed, n_train=train.n_rows, n_test=test.n_rows,
                          n_dropped_rows=full.n_dropped_rows, settings=settings)


@dataclass(frozen=True)
class BakeoffRow:
    """One model's held-out errors on one data scope."""

    scope: str
    model: str
    mse: float | None
    rmse: float | None
    mae: float | None
    score: float | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class BakeoffReport:
    rows: tuple[BakeoffRow, ...]
    seed: int
    n_train: int
    n_test: int


def _fit_mlp_row(train: DesignMatrix, test: DesignMatrix,
                 mlp: MlpSettings, seed: int) -> Metrics:
    """Fit the network on fully z-scored inputs and a standardized target.

    Gradient steps on raw count targets (hundreds to thousands) blow up
    at any useful learning rate, so the target is standardized for
    training and predictions are mapped back before scoring; reported
    metrics stay in original flow units.
    """
    x_scaler = ZScoreScaler()
    Xtr = x_scaler.fit(train.X).transform(train.X)
    Xte = x_scaler.transform(test.X)
    mu, sd = float(train.y.mean()), float(train.y.std())
    if sd == 0.0:
        sd = 1.0
    net = mlp.build(seed)
    net.fit(Xtr, (train.y - mu) / sd)
    pred = net.predict(Xte) * sd + mu
    return metrics(test.y, pred)


def run_bakeoff(dataset: Dataset, classes: dict[int, StationClass],
                station_subset=None, split_spec: SplitSpec = SplitSpec(),
                settings: EnsembleSettings = EnsembleSettings(),
                mlp: MlpSettings = MlpSettings(), seed: int = 0,
                day_filters: tuple[DayType | None, ...] = (None,),
                ) -> BakeoffReport:
    """Score bagging, random forest, and the network on identical splits.

    ``station_subset`` restricts rows to those stations (scope column
    reads ``all`` or ``selected_<k>``); ``day_filters`` adds one row
    block per filter, tagging the model name with the day type. A
    diverging network becomes a flagged row, never a crash.
    """
    if station_subset is not None:
        station_subset = sorted(int(s) for s in station_subset)
        known = set(int(s) for s in dataset.stations)
        missing = [s for s in station_subset if s not in known]
        if missing:
            raise TooFewObservations(f"stations not in dataset: {missing}")
    scope = "all" if station_subset is None else f"selected_{len(station_subset)}"

    rows = []
    n_train = n_test = 0
    for day_filter in day_filters:
        full = assemble(dataset, classes, mask=FeatureMask.all_on(),
                        day_filter=day_filter)
        if station_subset is not None:
            keep = np.flatnonzero(np.isin(full.stations, station_subset))
            if keep.size == 0:
                raise TooFewObservations("station subset matched no rows")
            full = full.take(keep)
        train, test = split(full, split_spec)
        scaler = ZScoreScaler(columns=full.weather_column_indices())
        scaler.fit(train.X)
        train = train.with_X(scaler.transform(train.X))
        test = test.with_X(scaler.transform(test.X))
        n_train, n_test = train.n_rows, test.n_rows

        tag = "" if day_filter is None else f"_{day_filter.value}"
        for kind in ("bagging", "random_forest"):
            model = settings.build(kind, seed)
            model.fit(train.X, train.y)
            m = metrics(test.y, model.predict(test.X))
            rows.append(BakeoffRow(scope=scope, model=kind + tag, mse=m.mse,
                                   rmse=m.rmse, mae=m.mae, score=m.r2))
        try:
            m = _fit_mlp_row(train, test, mlp, seed)
            rows.append(BakeoffRow(scope=scope, model="mlp" + tag, mse=m.mse,
                                   rmse=m.rmse, mae=m.mae, score=m.r2))
        except MetroflowError as e:
            rows.append(BakeoffRow(scope=scope, model="mlp" + tag, mse=None,
                                   rmse=None, mae=None, score=None,
                                   error=f"{type(e).__name__}: {e}"))
    return BakeoffReport(rows=tuple(rows), seed=seed,
                         n_train=n_train, n_test=n_test)


@dataclass(frozen=True)
class RegressionRow:
    """One station's linear fit at one slot, or its error."""

    slot: int
    station: int
    fit: OlsFit | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class RegressionReport:
    rows: tuple[RegressionRow, ...]
    day_type: DayType
    slots: tuple[int, ...]

    def rows_for_slot(self, slot: int) -> tuple[RegressionRow, ...]:
        return tuple(r for r in self.rows if r.slot == slot)


def run_regression_study(dataset: Dataset, stations, slots,
                         day_type: DayType) -> RegressionReport:
    """Per-station linear fit of centered flow on weather at fixed slots.

    The dependent variable is the station's count at the slot minus its
    same-date mean across slots, taken over days of the requested type.
    Regressors, in order: humidity, temperature, barometer (each
    z-scored over the study sample) and the raw rain level. A rain
    level that never varies over a slot's sample is omitted from that
    slot's design rather than poisoning every fit with a rank-deficient
    column. Stations whose fit degenerates get a flagged row instead of
    stopping the study.
    """
    stations = [int(s) for s in stations]
    slots = [int(t) for t in slots]
    for t in slots:
        if not (0 <= t < dataset.n_slots):
            raise TooFewObservations(f"slot {t} outside [0, {dataset.n_slots})")
    day_rows = np.flatnonzero(dataset.date_mask(day_type))
    centered = centered_flow_grid(dataset)

    rows = []
    for t in slots:
        hum = dataset.weather.humidity[day_rows, t]
        temp = dataset.weather.temperature[day_rows, t]
        baro = dataset.weather.barometer[day_rows, t]
        rain = dataset.weather.rain[day_rows, t].astype(float)
        X = np.column_stack([hum, temp, baro])
        sd = X.std(axis=0)
        mu = X.mean(axis=0)
        Xz = (X - mu) / np.where(sd == 0.0, 1.0, sd)
        if np.ptp(rain) > 0:
            design = np.column_stack([Xz, rain])
        else:
            design = Xz
        for s in stations:
            try:
                si = dataset.station_index(s)
            except KeyError:
                rows.append(RegressionRow(slot=t, station=s, fit=None,
                                          error="MissingKey: station not in dataset"))
                continue
            y = centered[si, day_rows, t]
            try:
                fit = ols_fit(design, y)
                rows.append(RegressionRow(slot=t, station=s, fit=fit))
            except MetroflowError as e:
                rows.append(RegressionRow(slot=t, station=s, fit=None,
                                          error=f"{type(e).__name__}: {e}"))
    return RegressionReport(rows=tuple(rows), day_type=day_type,
                            slots=tuple(slots))


def run_correlation(dataset: Dataset, classes: dict[int, StationClass],
                    ) -> CorrelationTable:
    """Correlate every design column with flow over total/workday/weekend rows.

    Row order: the four class dummies, the four weather variables, then
    the seven lags.
    """
    full = assemble(dataset, classes, mask=FeatureMask.all_on())
    idx = [full.column_index(name) for name in CORRELATION_ROW_ORDER]
    X = full.X[:, idx]
    return correlation_table(CORRELATION_ROW_ORDER, X, full.y, full.weekend)
