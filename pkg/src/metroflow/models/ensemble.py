"""Bootstrap-aggregated trees: bagging and random forest.

Randomness contract (bit-reproducible, order-independent):

* member ``b`` draws its bootstrap row indices from the stream seeded
  with ``derive(derive(seed, 1), b)``;
* member ``b`` of a forest feeds per-node feature subsets from the
  stream seeded with ``derive(derive(seed, 2), b)``.

Both streams depend only on (seed, member index), so serial and
parallel fits produce identical ensembles, and two fits differing only
in feature columns consume identical bootstrap index sequences. When
the per-split subset covers every feature (``feature_subsample`` = 1.0
or a single feature), the forest consumes no feature-stream draws and
equals bagging exactly.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ..errors import EmptyInput, InvalidConfig
from ..rng import SplitMix64, derive
from .base import check_X, check_X_y
from .tree import TreeArrays, check_tree_params, grow_tree

BOOTSTRAP_STREAM = 1
FEATURE_STREAM = 2


def bootstrap_indices(seed: int, member: int, n_rows: int, n_draws: int) -> np.ndarray:
    """Row indices one member resamples; a pure function of (seed, member)."""
    stream = SplitMix64(derive(derive(seed, BOOTSTRAP_STREAM), member))
    return stream.integers(n_rows, size=n_draws)


def _check_ensemble_params(n_estimators, bootstrap_size, feature_subsample=None):
    if int(n_estimators) < 1:
        raise InvalidConfig(f"n_estimators must be >= 1, got {n_estimators}")
    if not (0.0 < float(bootstrap_size) <= 1.0):
        raise InvalidConfig(f"bootstrap_size must be in (0, 1], got {bootstrap_size}")
    if feature_subsample is not None and not (0.0 < float(feature_subsample) <= 1.0):
        raise InvalidConfig(
            f"feature_subsample must be in (0, 1], got {feature_subsample}"
        )


class BaggingEnsemble(RegressorMixin, BaseEstimator):
    """Average of regression trees fitted on bootstrap resamples.

    Each member trains on ``floor(bootstrap_size * n)`` rows drawn with
    replacement from its own derived stream (see module docstring); the
    prediction is the unweighted mean over members.

    Parameters
    ----------
    n_estimators : int, default 100
    max_depth : int or None, default None
    min_samples_leaf : int, default 1
    min_impurity_decrease : float, default 0.0
    bootstrap_size : float, default 1.0
        Resample size as a fraction of the training rows.
    seed : int, default 0

    Attributes
    ----------
    n_features_in_ : int
    trees_ : list of TreeArrays
    """

    _kind = "bagging"

    def __init__(self, n_estimators=100, max_depth=None, min_samples_leaf=1,
                 min_impurity_decrease=0.0, bootstrap_size=1.0, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_impurity_decrease = min_impurity_decrease
        self.bootstrap_size = bootstrap_size
        self.seed = seed

    def _mtry(self, d: int) -> int:
        return d

    def _feature_stream_state(self, member: int) -> int:
        return 0

    def member_indices(self, member: int, n_rows: int) -> np.ndarray:
        """Bootstrap row indices of one member for a given training size."""
        n_draws = math.floor(float(self.bootstrap_size) * n_rows)
        if n_draws < 1:
            raise EmptyInput(
                f"bootstrap_size {self.bootstrap_size} draws zero rows from {n_rows}"
            )
        return bootstrap_indices(self.seed, member, n_rows, n_draws)

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_tree_params(self.max_depth, self.min_samples_leaf,
                          self.min_impurity_decrease)
        _check_ensemble_params(self.n_estimators, self.bootstrap_size)
        n, d = X.shape
        self.n_features_in_ = d
        mtry = self._mtry(d)
        trees = []
        for b in range(int(self.n_estimators)):
            idx = self.member_indices(b, n)
            trees.append(grow_tree(
                X[idx], y[idx], self.max_depth, self.min_samples_leaf,
                self.min_impurity_decrease,
                mtry=mtry, stream_state=self._feature_stream_state(b),
            ))
        self.trees_ = trees
        return self

    def predict(self, X):
        X = check_X(self, X)
        total = np.zeros(X.shape[0])
        for tree in self.trees_:
            total += tree.predict(X)
        return total / len(self.trees_)


class RandomForest(BaggingEnsemble):
    """Bagging plus per-split random feature subsampling.

    Every split-searching node considers a fresh random subset of
    ``ceil(feature_subsample * d)`` features drawn from the member's
    feature stream (see module docstring). With ``feature_subsample``
    = 1.0, or with a single feature, no draws are consumed and the
    forest coincides with :class:`BaggingEnsemble` bit for bit.

    Parameters
    ----------
    feature_subsample : float, default 1/3
        Fraction of features considered per split.

    Other parameters and attributes match :class:`BaggingEnsemble`.
    """

    _kind = "random_forest"

    def __init__(self, n_estimators=100, max_depth=None, min_samples_leaf=1,
                 min_impurity_decrease=0.0, bootstrap_size=1.0,
                 feature_subsample=1.0 / 3.0, seed=0):
        super().__init__(
            n_estimators=n_estimators, max_depth=max_depth,
            min_samples_leaf=min_samples_leaf,
            min_impurity_decrease=min_impurity_decrease,
            bootstrap_size=bootstrap_size, seed=seed,
        )
        self.feature_subsample = feature_subsample

    def _mtry(self, d: int) -> int:
        _check_ensemble_params(self.n_estimators, self.bootstrap_size,
                               self.feature_subsample)
        return min(d, math.ceil(float(self.feature_subsample) * d))

    def _feature_stream_state(self, member: int) -> int:
        return derive(derive(self.seed, FEATURE_STREAM), member)
