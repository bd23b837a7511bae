import json

import pytest
from click.testing import CliRunner

from metroflow.cli import main

SYNTH_CONFIG = {
    "n_stations": 8,
    "n_days": 20,
    "class_counts": [2, 2, 2, 2],
    "noise_scale": 5.0,
    "workday_effects": [0, 0, 0, -60],
    "weekend_effects": [0, 0, 0, -60],
    "weather_steps": [0.6, 3.0, 2.5, 12.0],
}

TINY_ENSEMBLE = ["--n-estimators", "2", "--max-depth", "3",
                 "--min-samples-leaf", "30"]


def _invoke(args):
    runner = CliRunner()
    result = runner.invoke(main, args)
    return result


def _all_output(result) -> str:
    text = result.output
    try:
        text += result.stderr
    except (ValueError, AttributeError):
        pass
    return text


def _data_rows(path):
    """CSV rows below the comment header and the column header."""
    lines = path.read_text().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    return body[0], body[1:]


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-synth")
    config_path = root / "config.json"
    config_path.write_text(json.dumps(SYNTH_CONFIG))
    data = root / "data"
    result = _invoke(["synth", "--config", str(config_path), "--seed", "3",
                      "--out", str(data)])
    assert result.exit_code == 0, result.output
    return data


class TestSynthCommand:
    def test_writes_dataset_and_ground_truth(self, synth_dir):
        for name in ("flow.csv", "weather.csv", "holidays.txt", "meta.json",
                     "ground_truth.json"):
            assert (synth_dir / name).exists()

    def test_ground_truth_structure(self, synth_dir):
        doc = json.loads((synth_dir / "ground_truth.json").read_text())
        assert doc["seed"] == 3
        assert len(doc["classes"]) == 8
        assert doc["weekend_effects"] == [0.0, 0.0, 0.0, -60.0]
        assert "config_hash" in doc

    def test_seed_flag_overrides_config_seed(self, synth_dir, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({**SYNTH_CONFIG, "seed": 9}))
        out = tmp_path / "data"
        result = _invoke(["synth", "--config", str(config_path), "--seed", "3",
                          "--out", str(out)])
        assert result.exit_code == 0
        assert (out / "flow.csv").read_bytes() == \
            (synth_dir / "flow.csv").read_bytes()


class TestClassifyCommand:
    def test_writes_classes_csv(self, synth_dir, tmp_path):
        result = _invoke(["classify", "--data", str(synth_dir),
                          "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        header, rows = _data_rows(tmp_path / "station_classes.csv")
        assert header == "station,class,mean,variance"
        assert len(rows) == 8
        assert (tmp_path / "station_classes.json").exists()

    def test_too_few_stations_exits_one_naming_stage(self, tmp_path):
        config_path = tmp_path / "one.json"
        config_path.write_text(json.dumps({
            "n_stations": 1, "n_days": 15, "class_counts": [1, 0, 0, 0],
        }))
        data = tmp_path / "data"
        assert _invoke(["synth", "--config", str(config_path),
                        "--out", str(data)]).exit_code == 0
        result = _invoke(["classify", "--data", str(data),
                          "--out", str(tmp_path / "out")])
        assert result.exit_code == 1
        assert "stations.classify_stations" in _all_output(result)


class TestUsageErrors:
    def test_missing_required_option(self):
        assert _invoke(["classify"]).exit_code == 2

    def test_unknown_command(self):
        assert _invoke(["transmogrify"]).exit_code == 2

    def test_nonexistent_data_dir(self, tmp_path):
        result = _invoke(["classify", "--data", str(tmp_path / "nope"),
                          "--out", str(tmp_path)])
        assert result.exit_code == 2


class TestIngestCommand:
    @pytest.fixture()
    def raw_files(self, tmp_path):
        flow = tmp_path / "flow_raw.csv"
        lines = ["date,origin,outbound,time,count"]
        for day in ("2018-05-02", "2018-05-03", "2018-05-04"):
            lines += [
                f"{day},77,88,08:15,5",
                f"{day},88,77,08:40,3",
                f"{day},77,88,18:30,7",
            ]
        lines.append("2018-05-03,77,88,09:15,x")
        flow.write_text("\n".join(lines) + "\n")

        weather = tmp_path / "weather_raw.csv"
        lines = ["date,time,temp,wind,humidity,barometer"]
        for day in ("2018-05-02", "2018-05-03", "2018-05-04"):
            for hour in range(6, 23):
                lines.append(f"{day},{hour:02d}:30,21.5,12.0,78.0,1009.0")
        weather.write_text("\n".join(lines) + "\n")
        return flow, weather

    def test_skip_mode_builds_dataset(self, raw_files, tmp_path):
        flow, weather = raw_files
        out = tmp_path / "data"
        result = _invoke(["ingest", "--flow", str(flow), "--weather",
                          str(weather), "--on-parse-error", "skip",
                          "--out", str(out)])
        assert result.exit_code == 0, result.output
        meta = json.loads((out / "meta.json").read_text())
        assert meta["config"]["n_skipped_flow"] == 1
        classify = _invoke(["classify", "--data", str(out),
                            "--out", str(tmp_path / "cls")])
        assert classify.exit_code == 0, classify.output

    def test_abort_mode_fails_on_bad_row(self, raw_files, tmp_path):
        flow, weather = raw_files
        result = _invoke(["ingest", "--flow", str(flow), "--weather",
                          str(weather), "--out", str(tmp_path / "data")])
        assert result.exit_code == 1
        assert "ingest.parse_flow_csv" in _all_output(result)


class TestAssembleCommand:
    def test_design_matrix_columns(self, synth_dir, tmp_path):
        result = _invoke(["assemble", "--data", str(synth_dir),
                          "--mask-index", "0", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        header, rows = _data_rows(tmp_path / "design_matrix.csv")
        columns = header.split(",")
        assert columns[:5] == ["station", "date", "slot", "weekend", "target"]
        assert "lag_1" in columns and "lag_7" in columns
        assert "temperature" not in columns
        assert len(rows) == 8 * 13 * 17


class TestTrainCommand:
    def test_writes_model_and_metrics(self, synth_dir, tmp_path):
        result = _invoke(["train", "--data", str(synth_dir), *TINY_ENSEMBLE,
                          "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "model.json").exists()
        header, rows = _data_rows(tmp_path / "metrics.csv")
        assert header == "scope,mse,rmse,mae,score"
        assert [r.split(",")[0] for r in rows] == ["train", "test"]


class TestAblateCommand:
    def test_both_day_filters_write_sixteen_rows(self, synth_dir, tmp_path):
        result = _invoke(["ablate", "--data", str(synth_dir), *TINY_ENSEMBLE,
                          "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        for tag in ("workday", "weekend"):
            header, rows = _data_rows(tmp_path / f"ablation_{tag}.csv")
            assert header == ("temperature,wind,humidity,barometer,"
                              "mae,mse,rmse,error")
            assert len(rows) == 16

    def test_rerun_is_byte_identical(self, synth_dir, tmp_path):
        args = ["ablate", "--data", str(synth_dir), "--day-filter", "workday",
                *TINY_ENSEMBLE]
        a, b = tmp_path / "a", tmp_path / "b"
        assert _invoke(args + ["--out", str(a)]).exit_code == 0
        assert _invoke(args + ["--out", str(b)]).exit_code == 0
        for name in ("ablation_workday.csv", "ablation_workday.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_config_file_supplies_settings(self, synth_dir, tmp_path):
        config_path = tmp_path / "run.json"
        config_path.write_text(json.dumps({
            "n_estimators": 2, "max_depth": 3, "min_samples_leaf": 30,
            "day_filter": "workday",
        }))
        result = _invoke(["ablate", "--data", str(synth_dir), "--config",
                          str(config_path), "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        sidecar = json.loads((tmp_path / "ablation_workday.json").read_text())
        assert sidecar["config"]["n_estimators"] == 2

    def test_flag_overrides_config(self, synth_dir, tmp_path):
        config_path = tmp_path / "run.json"
        config_path.write_text(json.dumps({
            "n_estimators": 2, "max_depth": 3, "min_samples_leaf": 30,
            "day_filter": "workday",
        }))
        result = _invoke(["ablate", "--data", str(synth_dir), "--config",
                          str(config_path), "--n-estimators", "3",
                          "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        sidecar = json.loads((tmp_path / "ablation_workday.json").read_text())
        assert sidecar["config"]["n_estimators"] == 3


class TestRegressCommand:
    def test_default_slots_and_day_types(self, synth_dir, tmp_path):
        result = _invoke(["regress", "--data", str(synth_dir),
                          "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        for day in ("workday", "weekend"):
            for stamp in ("1000", "1900"):
                header, rows = _data_rows(
                    tmp_path / f"regression_{day}_{stamp}.csv")
                assert header == ("station,r,r_square,adj_r_square,rmse,"
                                  "durbin_watson,error")
                assert len(rows) == 8

    def test_bad_slot_spelling_is_usage_error(self, synth_dir, tmp_path):
        result = _invoke(["regress", "--data", str(synth_dir), "--slots",
                          "ten am", "--out", str(tmp_path)])
        assert result.exit_code == 2


class TestCorrelateCommand:
    def test_fifteen_variable_rows(self, synth_dir, tmp_path):
        result = _invoke(["correlate", "--data", str(synth_dir),
                          "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        header, rows = _data_rows(tmp_path / "correlation.csv")
        assert header == "variable,total,workdays,weekends"
        assert len(rows) == 15
        assert rows[0].startswith("station_type_1,")
        assert rows[-1].startswith("lag_7,")


class TestBakeoffCommand:
    def test_three_model_rows(self, synth_dir, tmp_path):
        result = _invoke(["bakeoff", "--data", str(synth_dir), *TINY_ENSEMBLE,
                          "--epochs", "2", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        header, rows = _data_rows(tmp_path / "bakeoff.csv")
        assert header == "scope,model,mse,rmse,mae,score,error"
        assert [r.split(",")[1] for r in rows] == ["bagging", "random_forest",
                                                   "mlp"]
