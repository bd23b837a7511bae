"""Multilayer perceptron regressor trained by mini-batch SGD on MSE.

Architecture: fully connected layers with rectifier activations on the
hidden layers and a single linear output unit.

Randomness contract: weights are initialized layer by layer from the
stream seeded with ``derive(seed, 1)``; layer ``l`` with shape
(fan_in, fan_out) takes ``fan_in * fan_out`` uniform draws mapped to
``(2u - 1) * sqrt(6 / (fan_in + fan_out))`` and reshaped row-major.
Biases start at zero. The epoch-``e`` row shuffle comes from the stream
seeded with ``derive(derive(seed, 2), e)``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from ..errors import InvalidConfig, NonFiniteLoss
from ..rng import SplitMix64, derive
from .base import check_X, check_X_y

INIT_STREAM = 1
SHUFFLE_STREAM = 2


def mlp_forward(weights, biases, X):
    """Forward pass; returns predictions and per-layer pre-activations."""
    pre = []
    a = X
    last = len(weights) - 1
    for l, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        pre.append(z)
        a = z if l == last else np.maximum(z, 0.0)
    return a[:, 0], pre


def mlp_loss_and_grads(weights, biases, X, y):
    """Mean squared error and its analytic gradients for one batch.

    Used both for the SGD updates and as the subject of the
    finite-difference gradient check.
    """
    n = X.shape[0]
    y_hat, pre = mlp_forward(weights, biases, X)
    err = y_hat - y
    loss = float(np.mean(err * err))

    grads_w = [None] * len(weights)
    grads_b = [None] * len(biases)
    delta = (2.0 * err / n)[:, None]
    for l in range(len(weights) - 1, -1, -1):
        a_prev = X if l == 0 else np.maximum(pre[l - 1], 0.0)
        grads_w[l] = a_prev.T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ weights[l].T) * (pre[l - 1] > 0.0)
    return loss, grads_w, grads_b


def glorot_init(layer_sizes, seed):
    """Uniform Glorot weights and zero biases for the given layer sizes."""
    stream = SplitMix64(derive(seed, INIT_STREAM))
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        u = stream.uniform(size=fan_in * fan_out)
        weights.append(((2.0 * u - 1.0) * limit).reshape(fan_in, fan_out))
        biases.append(np.zeros(fan_out))
    return weights, biases


class MlpRegressor(RegressorMixin, BaseEstimator):
    """Feed-forward network regressor optimized by mini-batch SGD.

    Per epoch the training rows are reshuffled, consumed in consecutive
    mini-batches (the last batch may be smaller), and the full-training
    MSE after the epoch's updates is appended to ``loss_curve_``. A
    non-finite training loss aborts with :class:`NonFiniteLoss` naming
    the epoch.

    Parameters
    ----------
    hidden_layers : sequence of int, default (64,)
    learning_rate : float, default 1e-3
    epochs : int, default 200
    batch_size : int, default 32
    seed : int, default 0

    Attributes
    ----------
    n_features_in_ : int
    weights_, biases_ : list of ndarray
    loss_curve_ : list of float
    """

    def __init__(self, hidden_layers=(64,), learning_rate=1e-3, epochs=200,
                 batch_size=32, seed=0):
        self.hidden_layers = hidden_layers
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed

    def _check_params(self):
        widths = tuple(int(w) for w in self.hidden_layers)
        if any(w < 1 for w in widths):
            raise InvalidConfig(f"hidden layer widths must be >= 1, got {widths}")
        if float(self.learning_rate) < 0:
            raise InvalidConfig(f"learning_rate must be >= 0, got {self.learning_rate}")
        if int(self.epochs) < 1:
            raise InvalidConfig(f"epochs must be >= 1, got {self.epochs}")
        if int(self.batch_size) < 1:
            raise InvalidConfig(f"batch_size must be >= 1, got {self.batch_size}")
        return widths

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        widths = self._check_params()
        n, d = X.shape
        self.n_features_in_ = d
        sizes = (d, *widths, 1)
        weights, biases = glorot_init(sizes, self.seed)
        lr = float(self.learning_rate)
        batch = int(self.batch_size)
        losses = []
        for epoch in range(int(self.epochs)):
            order = SplitMix64(derive(derive(self.seed, SHUFFLE_STREAM),
                                      epoch)).permutation(n)
            for start in range(0, n, batch):
                rows = order[start:start + batch]
                _, gw, gb = mlp_loss_and_grads(weights, biases, X[rows], y[rows])
                for l in range(len(weights)):
                    weights[l] -= lr * gw[l]
                    biases[l] -= lr * gb[l]
            y_hat, _ = mlp_forward(weights, biases, X)
            loss = float(np.mean((y_hat - y) ** 2))
            if not math.isfinite(loss):
                raise NonFiniteLoss(epoch)
            losses.append(loss)
        self.weights_ = weights
        self.biases_ = biases
        self.loss_curve_ = losses
        return self

    def predict(self, X):
        X = check_X(self, X)
        y_hat, _ = mlp_forward(self.weights_, self.biases_, X)
        return y_hat
