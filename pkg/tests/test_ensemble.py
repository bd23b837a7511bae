import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metroflow.errors import EmptyInput, InvalidConfig, WidthMismatch
from metroflow.models import (
    BaggingEnsemble,
    RandomForest,
    RegressionTree,
    bootstrap_indices,
    model_from_dict,
    model_to_dict,
)
from metroflow.rng import SplitMix64, derive
from sklearn.exceptions import NotFittedError


def _data(seed=0, n=200, d=5):
    stream = SplitMix64(seed)
    X = stream.normal(size=n * d).reshape(n, d)
    y = X[:, 0] * 2 + np.sin(X[:, 1] * 2) + stream.normal(size=n) * 0.3
    return X, y


class TestBootstrapIndices:
    def test_stream_derivation_pinned(self):
        idx = bootstrap_indices(seed=9, member=3, n_rows=50, n_draws=50)
        expected = SplitMix64(derive(derive(9, 1), 3)).integers(50, size=50)
        assert np.array_equal(idx, expected)

    def test_members_draw_distinct_resamples(self):
        a = bootstrap_indices(seed=9, member=0, n_rows=100, n_draws=100)
        b = bootstrap_indices(seed=9, member=1, n_rows=100, n_draws=100)
        assert not np.array_equal(a, b)

    def test_range(self):
        idx = bootstrap_indices(seed=2, member=0, n_rows=7, n_draws=500)
        assert idx.min() >= 0 and idx.max() < 7


class TestBaggingEnsemble:
    def test_deterministic(self):
        X, y = _data()
        p1 = BaggingEnsemble(n_estimators=10, seed=4).fit(X, y).predict(X)
        p2 = BaggingEnsemble(n_estimators=10, seed=4).fit(X, y).predict(X)
        assert np.array_equal(p1, p2)

    def test_seed_changes_predictions(self):
        X, y = _data()
        p1 = BaggingEnsemble(n_estimators=10, seed=4).fit(X, y).predict(X)
        p2 = BaggingEnsemble(n_estimators=10, seed=5).fit(X, y).predict(X)
        assert not np.array_equal(p1, p2)

    def test_prediction_is_member_mean(self):
        X, y = _data(n=80)
        ens = BaggingEnsemble(n_estimators=7, seed=1).fit(X, y)
        member_preds = np.stack([
            RegressionTree().fit(
                X[bootstrap_indices(1, b, 80, 80)],
                y[bootstrap_indices(1, b, 80, 80)]).predict(X)
            for b in range(7)])
        assert np.allclose(ens.predict(X), member_preds.mean(axis=0),
                           atol=1e-9)

    def test_bootstrap_size_fraction(self):
        X, y = _data(n=100)
        ens = BaggingEnsemble(n_estimators=3, bootstrap_size=0.5, seed=0)
        idx = ens.member_indices(member=0, n_rows=100)
        assert len(idx) == 50

    def test_zero_draw_bootstrap_rejected(self):
        X, y = _data(n=10)
        ens = BaggingEnsemble(n_estimators=2, bootstrap_size=0.01, seed=0)
        with pytest.raises(EmptyInput):
            ens.fit(X, y)

    def test_bad_params(self):
        X, y = _data(n=20)
        with pytest.raises(InvalidConfig):
            BaggingEnsemble(n_estimators=0).fit(X, y)
        with pytest.raises(InvalidConfig):
            BaggingEnsemble(bootstrap_size=0.0).fit(X, y)

    def test_predict_before_fit(self):
        with pytest.raises(NotFittedError):
            BaggingEnsemble().predict(np.ones((2, 2)))

    def test_width_checked(self):
        X, y = _data(n=30)
        ens = BaggingEnsemble(n_estimators=2, seed=0).fit(X, y)
        with pytest.raises(WidthMismatch):
            ens.predict(np.ones((2, 3)))


class TestRandomForest:
    def test_full_subsample_equals_bagging(self):
        X, y = _data()
        bag = BaggingEnsemble(n_estimators=8, seed=3).fit(X, y).predict(X)
        forest = RandomForest(n_estimators=8, feature_subsample=1.0,
                              seed=3).fit(X, y).predict(X)
        assert np.array_equal(bag, forest)

    def test_partial_subsample_differs_from_bagging(self):
        X, y = _data()
        bag = BaggingEnsemble(n_estimators=8, seed=3).fit(X, y).predict(X)
        forest = RandomForest(n_estimators=8, feature_subsample=1 / 3,
                              seed=3).fit(X, y).predict(X)
        assert not np.array_equal(bag, forest)

    def test_deterministic(self):
        X, y = _data()
        p1 = RandomForest(n_estimators=6, seed=2).fit(X, y).predict(X)
        p2 = RandomForest(n_estimators=6, seed=2).fit(X, y).predict(X)
        assert np.array_equal(p1, p2)

    def test_mtry_ceiling(self):
        forest = RandomForest(feature_subsample=1 / 3)
        assert forest._mtry(17) == 6
        assert forest._mtry(3) == 1

    def test_bad_subsample(self):
        X, y = _data(n=20)
        with pytest.raises(InvalidConfig):
            RandomForest(feature_subsample=0.0).fit(X, y)
        with pytest.raises(InvalidConfig):
            RandomForest(feature_subsample=1.5).fit(X, y)


class TestSerialization:
    @pytest.mark.parametrize("cls,kwargs", [
        (BaggingEnsemble, {"n_estimators": 5, "seed": 6}),
        (RandomForest, {"n_estimators": 5, "feature_subsample": 0.5,
                        "seed": 6}),
    ])
    def test_round_trip_exact(self, cls, kwargs):
        X, y = _data(n=60)
        model = cls(**kwargs).fit(X, y)
        clone = model_from_dict(model_to_dict(model))
        assert np.array_equal(clone.predict(X), model.predict(X))
        assert clone.get_params() == model.get_params()


class TestVarianceReduction:
    @given(seed=st.integers(min_value=0, max_value=200))
    @settings(max_examples=10, deadline=None)
    def test_ensemble_never_explodes(self, seed):
        X, y = _data(seed=seed, n=120)
        ens = BaggingEnsemble(n_estimators=10, seed=seed).fit(X, y)
        preds = ens.predict(X)
        assert preds.min() >= y.min() - 1e-9
        assert preds.max() <= y.max() + 1e-9
