"""Report serialization: commented CSVs with JSON sidecars.

Every writer emits the same envelope: ``# key: value`` comment lines
(always including the seed and a sha256 hash of the run configuration),
one header row, then data rows with floats rendered by ``repr`` for
exact round-trips and ``None`` cells left empty. Nothing time- or
host-dependent is written, so a rerun with the same inputs reproduces
every byte. Each CSV gets a ``.json`` sidecar holding the full
configuration and row count.

Column orders are fixed: ablation rows carry the four mask flags then
mae, mse, rmse; bakeoff rows carry scope, model, mse, rmse, mae, score;
regression rows carry station, r, r_square, adj_r_square, rmse,
durbin_watson; correlation rows carry variable, total, workdays,
weekends. Rows that failed keep their metric cells empty and put the
message in a trailing ``error`` column.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from .core import slot_start
from .harness import AblationReport, BakeoffReport, RegressionReport
from .stats import CorrelationTable

ABLATION_COLUMNS = ("temperature", "wind", "humidity", "barometer",
                    "mae", "mse", "rmse", "error")
BAKEOFF_COLUMNS = ("scope", "model", "mse", "rmse", "mae", "score", "error")
REGRESSION_COLUMNS = ("station", "r", "r_square", "adj_r_square", "rmse",
                      "durbin_watson", "error")
CORRELATION_COLUMNS = ("variable", "total", "workdays", "weekends")
CLASSES_COLUMNS = ("station", "class", "mean", "variance")


def config_hash(config: dict) -> str:
    """sha256 over the canonical JSON form of a configuration dict."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, columns, rows, config: dict, seed: int,
              extra_comments: dict | None = None) -> str:
    """Write one commented CSV and its JSON sidecar; returns the hash."""
    path = Path(path)
    h = config_hash(config)
    comments = {"config_hash": h, "seed": seed}
    if extra_comments:
        comments.update(extra_comments)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key, value in comments.items():
            fh.write(f"# {key}: {_cell(value)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    sidecar = {"config": config, "config_hash": h, "seed": seed,
               "columns": list(columns), "n_rows": len(rows)}
    if extra_comments:
        sidecar.update(extra_comments)
    with open(path.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return h


def write_ablation_csv(report: AblationReport, path, config: dict) -> str:
    """16 mask rows, already sorted by ascending test MSE."""
    rows = [(*r.mask.flags(), r.mae, r.mse, r.rmse, r.error)
            for r in report.rows]
    extra = {
        "model": report.model,
        "day_filter": "all" if report.day_filter is None else report.day_filter.value,
        "n_train": report.n_train,
        "n_test": report.n_test,
        "n_dropped_rows": report.n_dropped_rows,
    }
    return write_csv(path, ABLATION_COLUMNS, rows, config, report.seed, extra)


def write_bakeoff_csv(report: BakeoffReport, path, config: dict) -> str:
    rows = [(r.scope, r.model, r.mse, r.rmse, r.mae, r.score, r.error)
            for r in report.rows]
    extra = {"n_train": report.n_train, "n_test": report.n_test}
    return write_csv(path, BAKEOFF_COLUMNS, rows, config, report.seed, extra)


def slot_label(slot: int, slice_minutes: int) -> str:
    """HHMM tag of the slot's wall-clock start, for file names."""
    t = slot_start(slot, slice_minutes)
    return f"{t.hour:02d}{t.minute:02d}"


def write_regression_csvs(report: RegressionReport, out_dir, slice_minutes: int,
                          config: dict, seed: int) -> list[str]:
    """One CSV per studied slot, named regression_<daytype>_<HHMM>.csv."""
    out_dir = Path(out_dir)
    names = []
    for slot in report.slots:
        rows = []
        for r in report.rows_for_slot(slot):
            f = r.fit
            if f is None:
                rows.append((r.station, None, None, None, None, None, r.error))
            else:
                rows.append((r.station, f.r, f.r2, f.adj_r2, f.rmse, f.dw, None))
        name = f"regression_{report.day_type.value}_{slot_label(slot, slice_minutes)}.csv"
        extra = {"day_filter": report.day_type.value, "slot": slot}
        write_csv(out_dir / name, REGRESSION_COLUMNS, rows, config, seed, extra)
        names.append(name)
    return names


def write_correlation_csv(table: CorrelationTable, path, config: dict,
                          seed: int) -> str:
    rows = [(r.variable, r.total, r.workdays, r.weekends) for r in table]
    return write_csv(path, CORRELATION_COLUMNS, rows, config, seed)


def write_classes_csv(stats, classes, path, config: dict, seed: int) -> str:
    """Per-station class with the statistics behind the call."""
    rows = [(s.station, classes[s.station].value, s.mean_flow, s.var_flow)
            for s in stats]
    return write_csv(path, CLASSES_COLUMNS, rows, config, seed)
