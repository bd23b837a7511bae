import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from metroflow.errors import (
    AllZeroResiduals,
    ConstantInput,
    LengthMismatch,
    RankDeficient,
    TooFewObservations,
)
from metroflow.rng import SplitMix64
from metroflow.stats import (
    correlation_table,
    durbin_watson,
    metrics,
    ols_fit,
    pearson,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False,
                          allow_infinity=False)


class TestMetrics:
    def test_matches_brute_force(self):
        stream = SplitMix64(11)
        y = stream.normal(size=50) * 10
        p = y + stream.normal(size=50)
        m = metrics(y, p)
        err = y - p
        assert m.mae == pytest.approx(np.mean(np.abs(err)), rel=1e-12)
        assert m.mse == pytest.approx(np.mean(err ** 2), rel=1e-12)
        assert m.rmse == pytest.approx(np.sqrt(np.mean(err ** 2)), rel=1e-12)
        sst = np.sum((y - y.mean()) ** 2)
        assert m.r2 == pytest.approx(1 - np.sum(err ** 2) / sst, rel=1e-12)

    def test_perfect_prediction(self):
        y = np.array([1.0, 2.0, 3.0])
        m = metrics(y, y)
        assert (m.mae, m.mse, m.rmse, m.r2) == (0.0, 0.0, 0.0, 1.0)

    def test_constant_target_has_no_r2(self):
        m = metrics([5.0, 5.0, 5.0], [4.0, 5.0, 6.0])
        assert m.r2 is None
        assert m.constant_target

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            metrics([1.0, 2.0], [1.0])


class TestPearson:
    def test_known_value(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        assert pearson(x, 2 * x + 1) == pytest.approx(1.0)
        assert pearson(x, -x) == pytest.approx(-1.0)

    def test_matches_numpy(self):
        stream = SplitMix64(3)
        x = stream.normal(size=200)
        y = 0.3 * x + stream.normal(size=200)
        assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1],
                                              rel=1e-12)

    def test_constant_input_raises(self):
        with pytest.raises(ConstantInput):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ConstantInput):
            pearson([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])

    def test_too_few_observations(self):
        with pytest.raises(TooFewObservations):
            pearson([1.0], [2.0])

    @given(xs=st.lists(st.floats(min_value=-1e3, max_value=1e3,
                                 allow_nan=False), min_size=3, max_size=40),
           a=st.floats(min_value=0.01, max_value=100),
           b=st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
    @settings(max_examples=60, deadline=None)
    def test_affine_invariance(self, xs, a, b):
        x = np.array(xs)
        assume(x.std() > 1e-3)
        y = np.arange(len(x), dtype=float)
        r1 = pearson(x, y)
        r2 = pearson(a * x + b, y)
        assert r1 == pytest.approx(r2, abs=1e-7)
        assert -1.0 <= r1 <= 1.0


class TestDurbinWatson:
    def test_alternating_residuals(self):
        assert durbin_watson([3.0, -3.0, 3.0, -3.0]) == pytest.approx(3.0)

    def test_slow_drift_is_near_zero(self):
        dw = durbin_watson(np.linspace(1.0, 1.001, 500))
        assert dw < 0.1

    def test_all_zero_raises(self):
        with pytest.raises(AllZeroResiduals):
            durbin_watson([0.0, 0.0, 0.0])

    @given(st.lists(finite_floats, min_size=2, max_size=100))
    @settings(max_examples=80, deadline=None)
    def test_bounds(self, es):
        e = np.array(es)
        assume(float(np.sum(e * e)) > 0)
        assert 0.0 <= durbin_watson(e) <= 4.0


class TestOlsFit:
    def test_recovers_exact_coefficients(self):
        stream = SplitMix64(17)
        X = stream.normal(size=120).reshape(40, 3)
        y = 2.0 + X @ np.array([1.5, -0.5, 3.0])
        fit = ols_fit(X, y)
        assert fit.coef == pytest.approx((2.0, 1.5, -0.5, 3.0), abs=1e-9)
        assert fit.r2 == pytest.approx(1.0)
        assert fit.rmse == pytest.approx(0.0, abs=1e-9)
        assert fit.dw is None or 0.0 <= fit.dw <= 4.0

    def test_exactly_zero_residuals_leave_dw_unset(self):
        X = np.arange(8.0).reshape(8, 1)
        fit = ols_fit(X, 3.0 * X[:, 0])
        if fit.rmse == 0.0:
            assert fit.dw is None

    def test_predict_matches_fit(self):
        stream = SplitMix64(18)
        X = stream.normal(size=60).reshape(30, 2)
        y = X @ np.array([1.0, 2.0]) + stream.normal(size=30)
        fit = ols_fit(X, y)
        pred = fit.predict(X)
        resid = y - pred
        assert abs(np.sum(resid)) < 1e-8
        assert fit.dw == pytest.approx(durbin_watson(resid))

    def test_adjusted_r2_formula(self):
        stream = SplitMix64(19)
        X = stream.normal(size=60).reshape(30, 2)
        y = X[:, 0] + stream.normal(size=30)
        fit = ols_fit(X, y)
        n, p = 30, 2
        expected = 1 - (1 - fit.r2) * (n - 1) / (n - p - 1)
        assert fit.adj_r2 == pytest.approx(expected, rel=1e-12)
        assert fit.r == pytest.approx(np.sqrt(fit.r2), rel=1e-12)

    def test_rank_deficient_names_columns(self):
        X = np.column_stack([np.arange(10.0), 2 * np.arange(10.0)])
        with pytest.raises(RankDeficient) as exc:
            ols_fit(X, np.arange(10.0))
        assert exc.value.columns

    def test_too_few_observations(self):
        with pytest.raises(TooFewObservations):
            ols_fit(np.ones((3, 2)) + np.eye(3, 2), np.arange(3.0))

    def test_constant_target_raises(self):
        stream = SplitMix64(20)
        X = stream.normal(size=20).reshape(10, 2)
        with pytest.raises(ConstantInput):
            ols_fit(X, np.full(10, 7.0))


class TestCorrelationTable:
    def test_scopes_and_order(self):
        stream = SplitMix64(23)
        x1 = stream.normal(size=60)
        x2 = stream.normal(size=60)
        y = x1 + 0.1 * stream.normal(size=60)
        weekend = np.zeros(60, dtype=bool)
        weekend[40:] = True
        table = correlation_table(("a", "b"), np.column_stack([x1, x2]), y,
                                  weekend)
        rows = list(table)
        assert [r.variable for r in rows] == ["a", "b"]
        assert rows[0].total == pytest.approx(pearson(x1, y))
        assert rows[0].workdays == pytest.approx(pearson(x1[:40], y[:40]))
        assert rows[0].weekends == pytest.approx(pearson(x1[40:], y[40:]))

    def test_constant_scope_cell_is_none(self):
        x = np.array([1.0, 1.0, 2.0, 3.0])
        y = np.array([1.0, 2.0, 3.0, 4.0])
        weekend = np.array([True, True, False, False])
        table = correlation_table(("x",), x.reshape(-1, 1), y, weekend)
        row = list(table)[0]
        assert row.weekends is None
        assert row.workdays is not None
