"""Input validation shared by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.exceptions import NotFittedError

from ..errors import EmptyInput, LengthMismatch, WidthMismatch


def check_X_y(X, y):
    """Coerce training inputs to contiguous float64 and validate them."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    if y.ndim != 1:
        raise ValueError(f"y must be 1-dimensional, got shape {y.shape}")
    if X.shape[0] == 0:
        raise EmptyInput("cannot fit on zero rows")
    if X.shape[0] != y.shape[0]:
        raise LengthMismatch(f"X has {X.shape[0]} rows, y has {y.shape[0]}")
    if not np.isfinite(X).all():
        raise ValueError("X contains non-finite values")
    if not np.isfinite(y).all():
        raise ValueError("y contains non-finite values")
    return X, y


def check_X(estimator, X):
    """Validate prediction input against the fitted width."""
    if not hasattr(estimator, "n_features_in_"):
        raise NotFittedError(
            f"this {type(estimator).__name__} instance is not fitted yet; call fit first"
        )
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    if X.shape[1] != estimator.n_features_in_:
        raise WidthMismatch(estimator.n_features_in_, X.shape[1])
    return X
