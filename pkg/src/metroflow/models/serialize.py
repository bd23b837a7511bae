"""Self-describing JSON serialization for fitted models.

Every format embeds the constructor parameters (seed included) next to
the fitted state, and floats are written with Python's shortest
round-trip representation, so ``load_model(save_model(m))`` reproduces
predictions exactly.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import InvalidConfig
from .ensemble import BaggingEnsemble, RandomForest
from .mlp import MlpRegressor
from .tree import RegressionTree, TreeArrays


def model_to_dict(model) -> dict:
    if isinstance(model, RegressionTree):
        return {
            "kind": "regression_tree",
            "params": model.get_params(),
            "n_features_in": model.n_features_in_,
            "tree": model.tree_.to_dict(),
        }
    if isinstance(model, (BaggingEnsemble, RandomForest)):
        return {
            "kind": model._kind,
            "params": model.get_params(),
            "n_features_in": model.n_features_in_,
            "trees": [t.to_dict() for t in model.trees_],
        }
    if isinstance(model, MlpRegressor):
        params = model.get_params()
        params["hidden_layers"] = list(params["hidden_layers"])
        return {
            "kind": "mlp",
            "params": params,
            "n_features_in": model.n_features_in_,
            "weights": [w.tolist() for w in model.weights_],
            "biases": [b.tolist() for b in model.biases_],
            "loss_curve": list(model.loss_curve_),
        }
    raise InvalidConfig(f"cannot serialize model of type {type(model).__name__}")


def model_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "regression_tree":
        model = RegressionTree(**d["params"])
        model.n_features_in_ = int(d["n_features_in"])
        model.tree_ = TreeArrays.from_dict(d["tree"])
        return model
    if kind in ("bagging", "random_forest"):
        cls = BaggingEnsemble if kind == "bagging" else RandomForest
        model = cls(**d["params"])
        model.n_features_in_ = int(d["n_features_in"])
        model.trees_ = [TreeArrays.from_dict(t) for t in d["trees"]]
        return model
    if kind == "mlp":
        params = dict(d["params"])
        params["hidden_layers"] = tuple(params["hidden_layers"])
        model = MlpRegressor(**params)
        model.n_features_in_ = int(d["n_features_in"])
        model.weights_ = [np.asarray(w, dtype=float) for w in d["weights"]]
        model.biases_ = [np.asarray(b, dtype=float) for b in d["biases"]]
        model.loss_curve_ = [float(v) for v in d["loss_curve"]]
        return model
    raise InvalidConfig(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
