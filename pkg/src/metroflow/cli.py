"""Command-line entry: the pipeline as reproducible subcommands.

Every subcommand reads files, writes files under ``--out``, and prints
one line per artifact written. Nothing mutates its inputs. Exit codes:
0 on success, 1 when a pipeline stage fails (the message names the
stage), 2 on usage errors.

``--config`` names a flat JSON file whose keys mirror the long flag
names with underscores (``n_estimators``, ``train_fraction``, array
values for ``class_counts`` or ``workday_effects``); explicit flags
override config values. The effective parameter set is hashed into
every output's header and JSON sidecar, so identical inputs reproduce
identical bytes.
"""

from __future__ import annotations

import datetime as dt
import json
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np

from .core import DayType, default_holidays, load_holidays, slice_of
from .errors import MetroflowError
from .features import FeatureMask, SplitSpec, assemble, split
from .harness import (
    EnsembleSettings,
    MlpSettings,
    run_ablation,
    run_bakeoff,
    run_correlation,
    run_regression_study,
)
from .ingest import (
    align_weather,
    build_dataset,
    load_dataset,
    parse_flow_csv,
    parse_weather_csv,
    save_dataset,
)
from .models import save_model
from .reports import (
    config_hash,
    slot_label,
    write_ablation_csv,
    write_bakeoff_csv,
    write_classes_csv,
    write_correlation_csv,
    write_csv,
    write_regression_csvs,
)
from .stations import ClassThresholds, classify_stations, station_stats
from .stats import metrics
from .synth import ClassProfile, SyntheticConfig, generate_synthetic


@contextmanager
def _stage(name: str):
    """Convert pipeline failures into exit-1 errors naming the stage."""
    try:
        yield
    except MetroflowError as e:
        raise click.ClickException(f"{name}: {type(e).__name__}: {e}")


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise click.UsageError("config file must hold a JSON object")
    return cfg


def _pick(flag, cfg: dict, key: str, default):
    """Effective value: explicit flag, else config entry, else default."""
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


def _echo_artifact(path: Path):
    click.echo(f"wrote {path}")


def _out_dir(out) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(data_dir):
    with _stage("ingest.load_dataset"):
        return load_dataset(data_dir)


def _classes_for(dataset, mean_quantile, var_quantile):
    with _stage("stations.classify_stations"):
        thresholds = ClassThresholds(mean_quantile=mean_quantile,
                                     var_quantile=var_quantile)
        stats = station_stats(dataset)
        return stats, classify_stations(stats, thresholds)


_DAY_CHOICE = {"all": None, "workday": DayType.WORKDAY, "weekend": DayType.WEEKEND}


def _ensemble_settings(cfg: dict, n_estimators, max_depth, min_samples_leaf,
                       min_impurity_decrease, bootstrap_size, feature_subsample,
                       ) -> EnsembleSettings:
    return EnsembleSettings(
        n_estimators=int(_pick(n_estimators, cfg, "n_estimators", 100)),
        max_depth=_pick(max_depth, cfg, "max_depth", None),
        min_samples_leaf=int(_pick(min_samples_leaf, cfg, "min_samples_leaf", 1)),
        min_impurity_decrease=float(
            _pick(min_impurity_decrease, cfg, "min_impurity_decrease", 0.0)),
        bootstrap_size=float(_pick(bootstrap_size, cfg, "bootstrap_size", 1.0)),
        feature_subsample=float(
            _pick(feature_subsample, cfg, "feature_subsample", 1.0 / 3.0)),
    )


def _settings_dict(settings: EnsembleSettings) -> dict:
    return {
        "n_estimators": settings.n_estimators,
        "max_depth": settings.max_depth,
        "min_samples_leaf": settings.min_samples_leaf,
        "min_impurity_decrease": settings.min_impurity_decrease,
        "bootstrap_size": settings.bootstrap_size,
        "feature_subsample": settings.feature_subsample,
    }


def _ensemble_options(fn):
    for deco in (
        click.option("--n-estimators", type=int, default=None,
                     help="Trees per ensemble (default 100)."),
        click.option("--max-depth", type=int, default=None,
                     help="Depth cap; unlimited when omitted."),
        click.option("--min-samples-leaf", type=int, default=None,
                     help="Smallest allowed leaf (default 1)."),
        click.option("--min-impurity-decrease", type=float, default=None,
                     help="Minimum per-sample gain to split (default 0)."),
        click.option("--bootstrap-size", type=float, default=None,
                     help="Resample size as a fraction of n (default 1.0)."),
        click.option("--feature-subsample", type=float, default=None,
                     help="Forest per-split feature fraction (default 1/3)."),
    ):
        fn = deco(fn)
    return fn


@click.group()
def main():
    """Passenger-flow forecasting pipeline."""


@main.command()
@click.option("--flow", "flow_path", type=click.Path(exists=True), required=True,
              help="Raw per-trip flow CSV.")
@click.option("--weather", "weather_path", type=click.Path(exists=True),
              required=True, help="Raw weather observation CSV.")
@click.option("--holidays", "holidays_path", type=click.Path(exists=True),
              default=None, help="Holiday list; packaged calendar when omitted.")
@click.option("--slice-minutes", type=int, default=60, show_default=True)
@click.option("--on-parse-error", type=click.Choice(["abort", "skip"]),
              default="abort", show_default=True)
@click.option("--gap-fill", is_flag=True, help="Interpolate short weather gaps.")
@click.option("--out", required=True, help="Output dataset directory.")
def ingest(flow_path, weather_path, holidays_path, slice_minutes,
           on_parse_error, gap_fill, out):
    """Parse raw CSVs into the canonical on-disk dataset."""
    if holidays_path is None:
        holidays = default_holidays()
    else:
        with _stage("core.load_holidays"):
            holidays = load_holidays(holidays_path)
    with _stage("ingest.parse_flow_csv"):
        flow_result = parse_flow_csv(flow_path, on_error=on_parse_error)
    with _stage("ingest.parse_weather_csv"):
        weather_result = parse_weather_csv(weather_path, on_error=on_parse_error)
    with _stage("ingest.align_weather"):
        grid = align_weather(weather_result.records, slice_minutes,
                             gap_fill=gap_fill)
    with _stage("ingest.build_dataset"):
        dataset = build_dataset(flow_result.records, grid, holidays=holidays,
                                slice_minutes=slice_minutes)
    config = {"slice_minutes": slice_minutes, "on_parse_error": on_parse_error,
              "gap_fill": bool(gap_fill),
              "n_skipped_flow": flow_result.n_skipped,
              "n_skipped_weather": weather_result.n_skipped}
    out_path = _out_dir(out)
    with _stage("ingest.save_dataset"):
        names = save_dataset(dataset, out_path,
                             extra_meta={"config_hash": config_hash(config),
                                         "config": config})
    for name in names:
        _echo_artifact(out_path / name)


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mean-quantile", type=float, default=None,
              help="Mean split quantile (default 0.9).")
@click.option("--var-quantile", type=float, default=None,
              help="Variance split quantile (default 0.7).")
@click.option("--out", required=True)
def classify(data_dir, config_path, mean_quantile, var_quantile, out):
    """Assign each station to a mean/variance quadrant."""
    cfg = _load_config(config_path)
    mq = float(_pick(mean_quantile, cfg, "mean_quantile", 0.9))
    vq = float(_pick(var_quantile, cfg, "var_quantile", 0.7))
    dataset = _load(data_dir)
    stats, classes = _classes_for(dataset, mq, vq)
    config = {"mean_quantile": mq, "var_quantile": vq}
    out_path = _out_dir(out)
    target = out_path / "station_classes.csv"
    with _stage("reports.write_classes_csv"):
        write_classes_csv(stats, classes, target, config, seed=0)
    _echo_artifact(target)
    _echo_artifact(target.with_suffix(".json"))


@main.command(name="assemble")
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mask-index", type=click.IntRange(0, 15), default=None,
              help="Weather mask index 0..15 (default 15, all variables).")
@click.option("--day-filter", type=click.Choice(["all", "workday", "weekend"]),
              default=None)
@click.option("--mean-quantile", type=float, default=None)
@click.option("--var-quantile", type=float, default=None)
@click.option("--out", required=True)
def assemble_cmd(data_dir, config_path, mask_index, day_filter, mean_quantile,
                 var_quantile, out):
    """Write the design matrix for one weather mask."""
    cfg = _load_config(config_path)
    mask_index = int(_pick(mask_index, cfg, "mask_index", 15))
    day_key = _pick(day_filter, cfg, "day_filter", "all")
    mq = float(_pick(mean_quantile, cfg, "mean_quantile", 0.9))
    vq = float(_pick(var_quantile, cfg, "var_quantile", 0.7))
    dataset = _load(data_dir)
    _, classes = _classes_for(dataset, mq, vq)
    with _stage("features.assemble"):
        matrix = assemble(dataset, classes, mask=FeatureMask.from_index(mask_index),
                          day_filter=_DAY_CHOICE[day_key])
    config = {"mask_index": mask_index, "day_filter": day_key,
              "mean_quantile": mq, "var_quantile": vq}
    columns = ("station", "date", "slot", "weekend", "target") + matrix.columns
    rows = []
    for i in range(matrix.n_rows):
        rows.append((int(matrix.stations[i]), str(matrix.dates[i]),
                     int(matrix.slots[i]), int(matrix.weekend[i]),
                     float(matrix.y[i]))
                    + tuple(float(v) for v in matrix.X[i]))
    out_path = _out_dir(out)
    target = out_path / "design_matrix.csv"
    with _stage("reports.write_csv"):
        write_csv(target, columns, rows, config, seed=0,
                  extra_comments={"n_dropped_rows": matrix.n_dropped_rows})
    _echo_artifact(target)
    _echo_artifact(target.with_suffix(".json"))


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--model", type=click.Choice(["bagging", "random_forest"]),
              default=None, help="Ensemble kind (default bagging).")
@click.option("--mask-index", type=click.IntRange(0, 15), default=None)
@click.option("--day-filter", type=click.Choice(["all", "workday", "weekend"]),
              default=None)
@click.option("--train-fraction", type=float, default=None)
@click.option("--mean-quantile", type=float, default=None)
@click.option("--var-quantile", type=float, default=None)
@_ensemble_options
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True)
def train(data_dir, config_path, model, mask_index, day_filter, train_fraction,
          mean_quantile, var_quantile, n_estimators, max_depth, min_samples_leaf,
          min_impurity_decrease, bootstrap_size, feature_subsample, seed, out):
    """Fit one ensemble on the chronological split and save it."""
    cfg = _load_config(config_path)
    kind = _pick(model, cfg, "model", "bagging")
    mask_index = int(_pick(mask_index, cfg, "mask_index", 15))
    day_key = _pick(day_filter, cfg, "day_filter", "all")
    fraction = float(_pick(train_fraction, cfg, "train_fraction", 0.7))
    mq = float(_pick(mean_quantile, cfg, "mean_quantile", 0.9))
    vq = float(_pick(var_quantile, cfg, "var_quantile", 0.7))
    seed = int(_pick(seed, cfg, "seed", 0))
    settings = _ensemble_settings(cfg, n_estimators, max_depth, min_samples_leaf,
                                  min_impurity_decrease, bootstrap_size,
                                  feature_subsample)
    dataset = _load(data_dir)
    _, classes = _classes_for(dataset, mq, vq)
    with _stage("features.assemble"):
        matrix = assemble(dataset, classes, mask=FeatureMask.from_index(mask_index),
                          day_filter=_DAY_CHOICE[day_key])
    with _stage("features.split"):
        train_m, test_m = split(matrix, SplitSpec(train_fraction=fraction))
    with _stage(f"models.{kind}.fit"):
        estimator = settings.build(kind, seed)
        estimator.fit(train_m.X, train_m.y)
    config = {"model": kind, "mask_index": mask_index, "day_filter": day_key,
              "train_fraction": fraction, "mean_quantile": mq,
              "var_quantile": vq, **_settings_dict(settings)}
    out_path = _out_dir(out)
    model_path = out_path / "model.json"
    with _stage("models.save_model"):
        save_model(estimator, model_path)
    _echo_artifact(model_path)
    rows = []
    for scope, part in (("train", train_m), ("test", test_m)):
        m = metrics(part.y, estimator.predict(part.X))
        rows.append((scope, m.mse, m.rmse, m.mae, m.r2))
    metrics_path = out_path / "metrics.csv"
    with _stage("reports.write_csv"):
        write_csv(metrics_path, ("scope", "mse", "rmse", "mae", "score"),
                  rows, config, seed)
    _echo_artifact(metrics_path)
    _echo_artifact(metrics_path.with_suffix(".json"))


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--stations", "stations_arg", default=None,
              help="Comma-separated station ids; all stations when omitted.")
@click.option("--day-filters", "day_filters_arg", default=None,
              help="Comma-separated day scopes from {all,workday,weekend}.")
@click.option("--train-fraction", type=float, default=None)
@click.option("--mean-quantile", type=float, default=None)
@click.option("--var-quantile", type=float, default=None)
@_ensemble_options
@click.option("--epochs", type=int, default=None,
              help="Network training epochs (default 200).")
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True)
def bakeoff(data_dir, config_path, stations_arg, day_filters_arg, train_fraction,
            mean_quantile, var_quantile, n_estimators, max_depth,
            min_samples_leaf, min_impurity_decrease, bootstrap_size,
            feature_subsample, epochs, seed, out):
    """Score bagging, forest, and the network on one split."""
    cfg = _load_config(config_path)
    stations_arg = _pick(stations_arg, cfg, "stations", None)
    subset = None
    if stations_arg not in (None, "", "all"):
        if isinstance(stations_arg, str):
            subset = [int(tok) for tok in stations_arg.split(",") if tok.strip()]
        else:
            subset = [int(s) for s in stations_arg]
    filters_key = _pick(day_filters_arg, cfg, "day_filters", "all")
    if isinstance(filters_key, str):
        filter_names = [tok.strip() for tok in filters_key.split(",") if tok.strip()]
    else:
        filter_names = list(filters_key)
    bad = [name for name in filter_names if name not in _DAY_CHOICE]
    if bad:
        raise click.UsageError(f"unknown day filter {bad[0]!r}")
    fraction = float(_pick(train_fraction, cfg, "train_fraction", 0.7))
    mq = float(_pick(mean_quantile, cfg, "mean_quantile", 0.9))
    vq = float(_pick(var_quantile, cfg, "var_quantile", 0.7))
    epochs = int(_pick(epochs, cfg, "epochs", 200))
    seed = int(_pick(seed, cfg, "seed", 0))
    settings = _ensemble_settings(cfg, n_estimators, max_depth, min_samples_leaf,
                                  min_impurity_decrease, bootstrap_size,
                                  feature_subsample)
    mlp = MlpSettings(epochs=epochs)
    dataset = _load(data_dir)
    _, classes = _classes_for(dataset, mq, vq)
    with _stage("harness.run_bakeoff"):
        report = run_bakeoff(dataset, classes, station_subset=subset,
                             split_spec=SplitSpec(train_fraction=fraction),
                             settings=settings, mlp=mlp, seed=seed,
                             day_filters=tuple(_DAY_CHOICE[n] for n in filter_names))
    config = {"stations": subset, "day_filters": filter_names,
              "train_fraction": fraction, "mean_quantile": mq,
              "var_quantile": vq, "epochs": epochs, **_settings_dict(settings)}
    out_path = _out_dir(out)
    target = out_path / "bakeoff.csv"
    with _stage("reports.write_bakeoff_csv"):
        write_bakeoff_csv(report, target, config)
    _echo_artifact(target)
    _echo_artifact(target.with_suffix(".json"))


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--day-filter", type=click.Choice(["both", "all", "workday",
                                                 "weekend"]), default=None,
              help="Which report files to produce (default both).")
@click.option("--model", type=click.Choice(["bagging", "random_forest"]),
              default=None)
@click.option("--station", type=int, default=None,
              help="Restrict the study to one station.")
@click.option("--train-fraction", type=float, default=None)
@click.option("--mean-quantile", type=float, default=None)
@click.option("--var-quantile", type=float, default=None)
@_ensemble_options
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--out", required=True)
def ablate(data_dir, config_path, day_filter, model, station, train_fraction,
           mean_quantile, var_quantile, n_estimators, max_depth,
           min_samples_leaf, min_impurity_decrease, bootstrap_size,
           feature_subsample, seed, jobs, out):
    """Fit one model per weather mask and rank the 16 rows."""
    cfg = _load_config(config_path)
    day_key = _pick(day_filter, cfg, "day_filter", "both")
    kind = _pick(model, cfg, "model", "bagging")
    station = _pick(station, cfg, "station", None)
    fraction = float(_pick(train_fraction, cfg, "train_fraction", 0.7))
    mq = float(_pick(mean_quantile, cfg, "mean_quantile", 0.9))
    vq = float(_pick(var_quantile, cfg, "var_quantile", 0.7))
    seed = int(_pick(seed, cfg, "seed", 0))
    jobs = int(_pick(jobs, cfg, "jobs", 1))
    settings = _ensemble_settings(cfg, n_estimators, max_depth, min_samples_leaf,
                                  min_impurity_decrease, bootstrap_size,
                                  feature_subsample)
    dataset = _load(data_dir)
    _, classes = _classes_for(dataset, mq, vq)
    config = {"day_filter": day_key, "model": kind, "station": station,
              "train_fraction": fraction, "mean_quantile": mq,
              "var_quantile": vq, "jobs": jobs, **_settings_dict(settings)}
    filters = ([DayType.WORKDAY, DayType.WEEKEND] if day_key == "both"
               else [_DAY_CHOICE[day_key]])
    out_path = _out_dir(out)
    for flt in filters:
        with _stage("harness.run_ablation"):
            report = run_ablation(dataset, classes, day_filter=flt,
                                  split_spec=SplitSpec(train_fraction=fraction),
                                  settings=settings, seed=seed, model=kind,
                                  station=station, jobs=jobs)
        tag = "all" if flt is None else flt.value
        target = out_path / f"ablation_{tag}.csv"
        with _stage("reports.write_ablation_csv"):
            write_ablation_csv(report, target, config)
        _echo_artifact(target)
        _echo_artifact(target.with_suffix(".json"))


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--stations", "stations_arg", default=None,
              help="Comma-separated station ids; all stations when omitted.")
@click.option("--slots", "slots_arg", default=None,
              help="Comma-separated HH:MM slot starts (default 10:00,19:30).")
@click.option("--day-type", type=click.Choice(["both", "workday", "weekend"]),
              default=None)
@click.option("--out", required=True)
def regress(data_dir, config_path, stations_arg, slots_arg, day_type, out):
    """Per-station linear fits of centered flow on weather at fixed slots."""
    cfg = _load_config(config_path)
    stations_arg = _pick(stations_arg, cfg, "stations", None)
    slots_key = _pick(slots_arg, cfg, "slots", "10:00,19:30")
    day_key = _pick(day_type, cfg, "day_type", "both")
    dataset = _load(data_dir)
    if stations_arg in (None, "", "all"):
        station_ids = [int(s) for s in dataset.stations]
    elif isinstance(stations_arg, str):
        station_ids = [int(tok) for tok in stations_arg.split(",") if tok.strip()]
    else:
        station_ids = [int(s) for s in stations_arg]
    if isinstance(slots_key, str):
        slot_names = [tok.strip() for tok in slots_key.split(",") if tok.strip()]
    else:
        slot_names = [str(tok) for tok in slots_key]
    slots = []
    for name in slot_names:
        try:
            hour, minute = name.split(":")
            clock = dt.time(int(hour), int(minute))
        except ValueError:
            raise click.UsageError(f"bad slot time {name!r}; expected HH:MM")
        with _stage("core.slice_of"):
            slots.append(slice_of(dt.date(2018, 1, 1), clock,
                                  dataset.slice_minutes).slot)
    config = {"stations": station_ids, "slots": slot_names, "day_type": day_key}
    day_types = ([DayType.WORKDAY, DayType.WEEKEND] if day_key == "both"
                 else [_DAY_CHOICE[day_key]])
    out_path = _out_dir(out)
    for flt in day_types:
        with _stage("harness.run_regression_study"):
            report = run_regression_study(dataset, station_ids, slots, flt)
        with _stage("reports.write_regression_csvs"):
            names = write_regression_csvs(report, out_path,
                                          dataset.slice_minutes, config, seed=0)
        for name in names:
            _echo_artifact(out_path / name)
            _echo_artifact((out_path / name).with_suffix(".json"))


@main.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mean-quantile", type=float, default=None)
@click.option("--var-quantile", type=float, default=None)
@click.option("--out", required=True)
def correlate(data_dir, config_path, mean_quantile, var_quantile, out):
    """Correlate every design column with flow per day scope."""
    cfg = _load_config(config_path)
    mq = float(_pick(mean_quantile, cfg, "mean_quantile", 0.9))
    vq = float(_pick(var_quantile, cfg, "var_quantile", 0.7))
    dataset = _load(data_dir)
    _, classes = _classes_for(dataset, mq, vq)
    with _stage("harness.run_correlation"):
        table = run_correlation(dataset, classes)
    config = {"mean_quantile": mq, "var_quantile": vq}
    out_path = _out_dir(out)
    target = out_path / "correlation.csv"
    with _stage("reports.write_correlation_csv"):
        write_correlation_csv(table, target, config, seed=0)
    _echo_artifact(target)
    _echo_artifact(target.with_suffix(".json"))


def _profile_from(value) -> ClassProfile:
    level, amplitude, level_jitter, amp_jitter = (float(v) for v in value)
    return ClassProfile(level=level, amplitude=amplitude,
                        level_jitter=level_jitter, amplitude_jitter=amp_jitter)


def _synthetic_config(cfg: dict, seed: int | None) -> SyntheticConfig:
    kwargs = {}
    for key in ("n_stations", "n_days", "slice_minutes"):
        if key in cfg:
            kwargs[key] = int(cfg[key])
    for key in ("weekend_factor", "noise_scale"):
        if key in cfg:
            kwargs[key] = float(cfg[key])
    for key in ("class_counts", "workday_effects", "weekend_effects",
                "weather_steps"):
        if key in cfg:
            kwargs[key] = tuple(cfg[key])
    if "start_date" in cfg:
        kwargs["start_date"] = dt.date.fromisoformat(cfg["start_date"])
    if "holidays" in cfg:
        kwargs["holidays"] = frozenset(dt.date.fromisoformat(d)
                                       for d in cfg["holidays"])
    if "profiles" in cfg:
        order = ("type1", "type2", "type3", "type4")
        from .stations import StationClass
        classes = (StationClass.HIGH_MEAN_HIGH_VAR, StationClass.LOW_MEAN_HIGH_VAR,
                   StationClass.HIGH_MEAN_LOW_VAR, StationClass.LOW_MEAN_LOW_VAR)
        profiles = {}
        for name, cls in zip(order, classes):
            if name not in cfg["profiles"]:
                raise click.UsageError(f"profiles must define {name}")
            profiles[cls] = _profile_from(cfg["profiles"][name])
        kwargs["profiles"] = profiles
    if seed is not None:
        kwargs["seed"] = int(seed)
    elif "seed" in cfg:
        kwargs["seed"] = int(cfg["seed"])
    return SyntheticConfig(**kwargs)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True)
def synth(config_path, seed, out):
    """Generate a synthetic dataset with recorded ground truth."""
    cfg = _load_config(config_path)
    with _stage("synth.generate_synthetic"):
        config = _synthetic_config(cfg, seed)
        dataset, truth = generate_synthetic(config)
    out_path = _out_dir(out)
    run_cfg = dict(cfg)
    run_cfg["seed"] = config.seed
    with _stage("ingest.save_dataset"):
        names = save_dataset(dataset, out_path,
                             extra_meta={"config_hash": config_hash(run_cfg),
                                         "config": run_cfg})
    for name in names:
        _echo_artifact(out_path / name)
    truth_doc = {
        "classes": {str(k): v.value for k, v in sorted(truth.classes.items())},
        "levels": [float(v) for v in truth.levels],
        "amplitudes": [float(v) for v in truth.amplitudes],
        "workday_effects": list(truth.workday_effects),
        "weekend_effects": list(truth.weekend_effects),
        "weekend_factor": truth.weekend_factor,
        "noise_scale": truth.noise_scale,
        "seed": truth.seed,
        "config_hash": config_hash(run_cfg),
    }
    truth_path = out_path / "ground_truth.json"
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth_doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    _echo_artifact(truth_path)
