import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metroflow.rng import SplitMix64, derive, mix64


class TestMix64:
    def test_deterministic(self):
        assert mix64(12345) == mix64(12345)

    def test_avalanche_on_adjacent_inputs(self):
        a, b = mix64(1), mix64(2)
        assert bin(a ^ b).count("1") > 10

    def test_derive_separates_keys(self):
        assert derive(7, 1) != derive(7, 2)
        assert derive(7, 1) != derive(8, 1)


class TestSplitMix64:
    def test_same_seed_same_stream(self):
        a = SplitMix64(42).uniform(size=100)
        b = SplitMix64(42).uniform(size=100)
        assert np.array_equal(a, b)

    def test_counter_based_draws_are_stateless_reads(self):
        stream = SplitMix64(42)
        first = stream.u64(size=5)
        again = SplitMix64(42).u64(size=5)
        assert np.array_equal(first, again)

    def test_uniform_in_unit_interval(self):
        u = SplitMix64(0).uniform(size=10_000)
        assert u.min() >= 0.0 and u.max() < 1.0

    def test_uniform_mean_near_half(self):
        u = SplitMix64(3).uniform(size=50_000)
        assert abs(u.mean() - 0.5) < 0.01

    def test_normal_moments(self):
        z = SplitMix64(5).normal(size=50_000)
        assert abs(z.mean()) < 0.02
        assert abs(z.std() - 1.0) < 0.02
        assert np.isfinite(z).all()

    @given(n=st.integers(min_value=1, max_value=300), seed=st.integers(
        min_value=0, max_value=2**32))
    @settings(max_examples=50, deadline=None)
    def test_integers_within_range(self, n, seed):
        draws = SplitMix64(seed).integers(n, size=64)
        assert draws.min() >= 0 and draws.max() < n

    @given(n=st.integers(min_value=1, max_value=200), seed=st.integers(
        min_value=0, max_value=2**32))
    @settings(max_examples=50, deadline=None)
    def test_permutation_is_a_permutation(self, n, seed):
        perm = SplitMix64(seed).permutation(n)
        assert sorted(perm.tolist()) == list(range(n))

    def test_distinct_seeds_distinct_streams(self):
        a = SplitMix64(1).uniform(size=50)
        b = SplitMix64(2).uniform(size=50)
        assert not np.array_equal(a, b)

    def test_derived_streams_uncorrelated(self):
        base = 99
        a = SplitMix64(derive(base, 1)).uniform(size=5000)
        b = SplitMix64(derive(base, 2)).uniform(size=5000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.05
