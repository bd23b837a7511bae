"""From-scratch regressors: CART tree, bagging, random forest, MLP."""

from .ensemble import BaggingEnsemble, RandomForest, bootstrap_indices
from .mlp import MlpRegressor, glorot_init, mlp_forward, mlp_loss_and_grads
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .tree import RegressionTree, TreeArrays, grow_tree

__all__ = [
    "BaggingEnsemble",
    "MlpRegressor",
    "RandomForest",
    "RegressionTree",
    "TreeArrays",
    "bootstrap_indices",
    "glorot_init",
    "grow_tree",
    "load_model",
    "mlp_forward",
    "mlp_loss_and_grads",
    "model_from_dict",
    "model_to_dict",
    "save_model",
]
