import numpy as np
import pytest

from metroflow.core import DayType
from metroflow.errors import TooFewObservations
from metroflow.features import FeatureMask, SplitSpec
from metroflow.harness import (
    CORRELATION_ROW_ORDER,
    EnsembleSettings,
    MlpSettings,
    enumerate_masks,
    run_ablation,
    run_bakeoff,
    run_correlation,
    run_regression_study,
)
from metroflow.synth import SyntheticConfig, generate_synthetic

FAST = EnsembleSettings(n_estimators=3, max_depth=5, min_samples_leaf=20)


@pytest.fixture(scope="module")
def lag_perfect():
    """Noise-free dataset where flow repeats weekly, so lag_7 is exact."""
    config = SyntheticConfig(seed=3, n_stations=6, n_days=25,
                             class_counts=(2, 2, 1, 1))
    dataset, truth = generate_synthetic(config)
    return dataset, truth.classes


@pytest.fixture(scope="module")
def ablation(small_dataset, small_classes):
    dataset, _ = small_dataset
    return run_ablation(dataset, small_classes, settings=FAST, seed=0)


class TestEnumerateMasks:
    def test_sixteen_in_canonical_order(self):
        masks = enumerate_masks()
        assert len(masks) == 16
        assert [m.index for m in masks] == list(range(16))
        assert masks[0] == FeatureMask()
        assert masks[15] == FeatureMask.all_on()


class TestEnsembleSettings:
    def test_builds_both_kinds(self):
        settings = EnsembleSettings(n_estimators=7, max_depth=3)
        bag = settings.build("bagging", seed=5)
        forest = settings.build("random_forest", seed=5)
        assert bag.n_estimators == 7
        assert forest.max_depth == 3
        assert forest.seed == 5

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            EnsembleSettings().build("boosting", seed=0)


class TestAblation:
    def test_sixteen_rows_covering_every_mask(self, ablation):
        assert len(ablation.rows) == 16
        assert sorted(r.mask.index for r in ablation.rows) == list(range(16))

    def test_rows_sorted_by_test_mse(self, ablation):
        ok = tuple(r for r in ablation.rows if r.ok)
        assert ok == ablation.rows[: len(ok)]
        mses = [r.mse for r in ok]
        assert mses == sorted(mses)

    def test_best_is_first(self, ablation):
        assert ablation.best == ablation.rows[0]
        assert ablation.best.ok

    def test_row_lookup(self, ablation):
        row = ablation.row_for(FeatureMask())
        assert row.mask.index == 0
        assert row.ok
        with pytest.raises(KeyError):
            ablation.row_for("not a mask")

    def test_deterministic(self, small_dataset, small_classes, ablation):
        dataset, _ = small_dataset
        again = run_ablation(dataset, small_classes, settings=FAST, seed=0)
        assert again.rows == ablation.rows

    def test_parallel_matches_serial(self, small_dataset, small_classes):
        dataset, _ = small_dataset
        tiny = EnsembleSettings(n_estimators=2, max_depth=3,
                                min_samples_leaf=30)
        serial = run_ablation(dataset, small_classes, settings=tiny, seed=1)
        parallel = run_ablation(dataset, small_classes, settings=tiny, seed=1,
                                jobs=2)
        assert serial.rows == parallel.rows

    def test_seed_changes_metrics(self, small_dataset, small_classes, ablation):
        dataset, _ = small_dataset
        other = run_ablation(dataset, small_classes, settings=FAST, seed=1)
        assert any(a.mse != b.mse
                   for a, b in zip(ablation.rows, other.rows))

    def test_day_filter_restricts_rows(self, small_dataset, small_classes):
        dataset, _ = small_dataset
        weekend = run_ablation(dataset, small_classes, settings=FAST,
                               day_filter=DayType.WEEKEND)
        both = run_ablation(dataset, small_classes, settings=FAST)
        assert weekend.day_filter is DayType.WEEKEND
        assert weekend.n_train + weekend.n_test < both.n_train + both.n_test

    def test_single_station_scope(self, small_dataset, small_classes):
        dataset, _ = small_dataset
        report = run_ablation(dataset, small_classes, settings=FAST, station=3)
        assert report.n_train + report.n_test == 23 * 17
        with pytest.raises(TooFewObservations):
            run_ablation(dataset, small_classes, settings=FAST, station=999)

    def test_failed_fits_become_flagged_rows(self, small_dataset,
                                             small_classes):
        dataset, _ = small_dataset
        broken = EnsembleSettings(n_estimators=2, bootstrap_size=1e-9)
        report = run_ablation(dataset, small_classes, settings=broken)
        assert all(not r.ok for r in report.rows)
        assert all(r.mse is None for r in report.rows)
        assert [r.mask.index for r in report.rows] == list(range(16))
        assert "EmptyInput" in report.rows[0].error

    def test_rejects_unknown_model_and_bad_jobs(self, small_dataset,
                                                small_classes):
        dataset, _ = small_dataset
        with pytest.raises(ValueError):
            run_ablation(dataset, small_classes, model="boosting")
        with pytest.raises(ValueError):
            run_ablation(dataset, small_classes, jobs=0)


class TestBakeoff:
    def test_weekly_repetition_is_learned_by_all_models(self, lag_perfect):
        dataset, classes = lag_perfect
        report = run_bakeoff(
            dataset, classes,
            settings=EnsembleSettings(n_estimators=3),
            mlp=MlpSettings(hidden_layers=(32,), learning_rate=1e-2,
                            epochs=300),
            seed=0,
        )
        assert [r.model for r in report.rows] == ["bagging", "random_forest",
                                                  "mlp"]
        for row in report.rows:
            assert row.ok
            assert row.scope == "all"
            assert row.score > 0.99

    def test_station_subset_scope_token(self, lag_perfect):
        dataset, classes = lag_perfect
        report = run_bakeoff(dataset, classes, station_subset=[1, 2, 3],
                             settings=FAST,
                             mlp=MlpSettings(hidden_layers=(8,), epochs=5))
        assert all(r.scope == "selected_3" for r in report.rows)

    def test_unknown_station_rejected(self, lag_perfect):
        dataset, classes = lag_perfect
        with pytest.raises(TooFewObservations):
            run_bakeoff(dataset, classes, station_subset=[999])

    def test_day_filter_rows_are_tagged(self, lag_perfect):
        dataset, classes = lag_perfect
        report = run_bakeoff(
            dataset, classes, settings=FAST,
            mlp=MlpSettings(hidden_layers=(8,), epochs=5),
            day_filters=(DayType.WORKDAY, DayType.WEEKEND),
        )
        assert [r.model for r in report.rows] == [
            "bagging_workday", "random_forest_workday", "mlp_workday",
            "bagging_weekend", "random_forest_weekend", "mlp_weekend",
        ]

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_diverging_network_becomes_flagged_row(self, lag_perfect):
        dataset, classes = lag_perfect
        report = run_bakeoff(
            dataset, classes, settings=FAST,
            mlp=MlpSettings(hidden_layers=(32,), learning_rate=1e9, epochs=5),
        )
        mlp_row = report.rows[2]
        assert mlp_row.model == "mlp"
        assert not mlp_row.ok
        assert "NonFiniteLoss" in mlp_row.error
        assert report.rows[0].ok and report.rows[1].ok


class TestRegressionStudy:
    def test_rows_per_station_and_slot(self, small_dataset):
        dataset, _ = small_dataset
        stations = [int(s) for s in dataset.stations]
        report = run_regression_study(dataset, stations, slots=(2, 12),
                                      day_type=DayType.WORKDAY)
        assert report.slots == (2, 12)
        assert len(report.rows) == 16
        assert len(report.rows_for_slot(2)) == 8
        for row in report.rows:
            assert row.ok
            fit = row.fit
            assert 0.0 <= fit.r2 <= 1.0
            assert fit.dw is None or 0.0 <= fit.dw <= 4.0

    def test_recovers_negative_barometer_effect(self, small_dataset):
        dataset, _ = small_dataset
        stations = [int(s) for s in dataset.stations]
        report = run_regression_study(dataset, stations, slots=(2,),
                                      day_type=DayType.WORKDAY)
        slopes = [r.fit.coef[3] for r in report.rows if r.ok]
        assert np.mean(slopes) < 0

    def test_unknown_station_flagged_not_fatal(self, small_dataset):
        dataset, _ = small_dataset
        report = run_regression_study(dataset, [1, 999], slots=(2,),
                                      day_type=DayType.WEEKEND)
        by_station = {r.station: r for r in report.rows}
        assert by_station[1].ok
        assert not by_station[999].ok
        assert "MissingKey" in by_station[999].error

    def test_slot_out_of_range(self, small_dataset):
        dataset, _ = small_dataset
        with pytest.raises(TooFewObservations):
            run_regression_study(dataset, [1], slots=(99,),
                                 day_type=DayType.WORKDAY)


class TestCorrelation:
    def test_row_order_and_bounds(self, small_dataset, small_classes):
        dataset, _ = small_dataset
        table = run_correlation(dataset, small_classes)
        assert tuple(r.variable for r in table) == CORRELATION_ROW_ORDER
        for row in table:
            for cell in (row.total, row.workdays, row.weekends):
                if cell is not None:
                    assert -1.0 <= cell <= 1.0

    def test_planted_barometer_effect_dominates_weather(self, small_dataset,
                                                        small_classes):
        dataset, _ = small_dataset
        table = run_correlation(dataset, small_classes)
        baro = abs(table.row("barometer").total)
        others = [abs(table.row(v).total)
                  for v in ("temperature", "wind_speed", "humidity")]
        assert baro > max(others)
