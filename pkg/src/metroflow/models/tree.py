"""CART regression tree with exact greedy variance-reduction splits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ..errors import InvalidConfig
from . import _tree_kernel
from .base import check_X, check_X_y

_NO_DEPTH_LIMIT = 2**31 - 1


def check_tree_params(max_depth, min_samples_leaf, min_impurity_decrease):
    if max_depth is not None and int(max_depth) < 1:
        raise InvalidConfig(f"max_depth must be positive or None, got {max_depth}")
    if int(min_samples_leaf) < 1:
        raise InvalidConfig(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")
    if float(min_impurity_decrease) < 0:
        raise InvalidConfig(
            f"min_impurity_decrease must be >= 0, got {min_impurity_decrease}"
        )


@dataclass(frozen=True)
class TreeArrays:
    """Flat array form of a fitted binary regression tree.

    ``feature[i] == -1`` marks a leaf. Internal node ``i`` routes a row
    left when ``x[feature[i]] <= threshold[i]`` and right otherwise.
    ``value`` holds the training-target mean of every node, so the leaf
    entries are the predictions. Nodes are stored in depth-first
    preorder with the root at index 0.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        for a in (self.feature, self.threshold, self.left, self.right, self.value):
            a.setflags(write=False)

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _tree_kernel.predict(
            X, self.feature, self.threshold, self.left, self.right, self.value
        )

    def to_dict(self) -> dict:
        return {
            "feature": [int(f) for f in self.feature],
            "threshold": [
                None if f < 0 else float(t)
                for f, t in zip(self.feature, self.threshold)
            ],
            "left": [int(v) for v in self.left],
            "right": [int(v) for v in self.right],
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeArrays":
        thr = np.array(
            [np.nan if t is None else float(t) for t in d["threshold"]], dtype=float
        )
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=thr,
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=float),
        )


def grow_tree(X, y, max_depth, min_samples_leaf, min_impurity_decrease,
              mtry=None, stream_state=0) -> TreeArrays:
    """Grow one tree on pre-validated arrays.

    Shared by the tree estimator and the ensembles. ``mtry`` < n_features
    enables per-node feature subsampling fed by the counter-based stream
    starting at ``stream_state`` (see the kernel docs for the exact
    draw sequence).
    """
    n, d = X.shape
    depth = _NO_DEPTH_LIMIT if max_depth is None else int(max_depth)
    sorted_idx = np.argsort(X, axis=0, kind="stable").T.copy()
    XT = np.ascontiguousarray(X.T)
    eff_mtry = d if mtry is None else int(mtry)
    out = _tree_kernel.grow(
        XT, y, sorted_idx, depth, 2, int(min_samples_leaf),
        float(min_impurity_decrease), eff_mtry, np.uint64(stream_state),
    )
    return TreeArrays(*out)


class RegressionTree(RegressorMixin, BaseEstimator):
    """Regression tree grown by exact greedy variance reduction.

    Each split minimizes the weighted child mean squared error,
    equivalently maximizes the variance reduction. Candidate thresholds
    are midpoints between consecutive distinct sorted values of each
    feature (snapped to the lower value when the midpoint rounds up to
    the upper one). A split is kept only when its impurity decrease is
    strictly greater than ``min_impurity_decrease``; equal-gain
    candidates resolve to the lowest feature index, then the lowest
    threshold. Leaves predict the mean of their training targets.

    Parameters
    ----------
    max_depth : int or None, default None
        Depth limit; None grows until leaves are pure or too small.
    min_samples_leaf : int, default 1
        Minimum rows on each side of any split.
    min_impurity_decrease : float, default 0.0
        Minimum strict impurity decrease for a split to be kept.

    Attributes
    ----------
    n_features_in_ : int
    tree_ : TreeArrays
    """

    def __init__(self, max_depth=None, min_samples_leaf=1, min_impurity_decrease=0.0):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_impurity_decrease = min_impurity_decrease

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        check_tree_params(self.max_depth, self.min_samples_leaf,
                          self.min_impurity_decrease)
        self.n_features_in_ = X.shape[1]
        self.tree_ = grow_tree(X, y, self.max_depth, self.min_samples_leaf,
                               self.min_impurity_decrease)
        return self

    def predict(self, X):
        X = check_X(self, X)
        return self.tree_.predict(X)

    @property
    def depth_(self) -> int:
        depth = np.zeros(self.tree_.node_count, dtype=np.int64)
        for i in range(self.tree_.node_count):
            f = self.tree_.feature[i]
            if f >= 0:
                depth[self.tree_.left[i]] = depth[i] + 1
                depth[self.tree_.right[i]] = depth[i] + 1
        return int(depth.max())
