"""Regression families: baselines, penalized least squares, neighbors, trees."""
from __future__ import annotations

import numpy as np

from ..errors import SingularSystemError
from .neighbors import nearest_indices
from .tree import VARIANCE, TreeNodes, grow_tree, predict_tree

_COND_LIMIT = 1e12


def fit_mean(X, y, hp, seed) -> dict:
    return {"value": float(np.mean(y))}


def predict_mean(params, X) -> np.ndarray:
    return np.full(len(X), params["value"], dtype=np.float64)


def fit_ridge(X, y, hp, seed) -> dict:
    """Ridge on the standardized design; the intercept is never penalized.

    lambda=0 is ordinary least squares; a singular normal-equation system is
    reported rather than silently regularized.
    """
    lam = float(hp["lambda"])
    n, d = X.shape
    design = np.hstack([X, np.ones((n, 1))])
    gram = design.T @ design
    penalty = np.diag([lam] * d + [0.0])
    system = gram + penalty
    if lam == 0.0 and (not np.isfinite(np.linalg.cond(system)) or np.linalg.cond(system) > _COND_LIMIT):
        raise SingularSystemError(
            "normal equations are singular for lambda=0 (collinear features)"
        )
    try:
        beta = np.linalg.solve(system, design.T @ y)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"normal equations not solvable: {exc}") from None
    return {
        "weights": beta[:d].tolist(),
        "interceptTerm": float(beta[d]),
        "lambda": lam,
    }


def predict_ridge(params, X) -> np.ndarray:
    w = np.asarray(params["weights"], dtype=np.float64)
    return X @ w + params["interceptTerm"]


def fit_knn_regressor(X, y, hp, seed) -> dict:
    return {
        "k": int(hp["k"]),
        "train": X.tolist(),
        "targets": [float(v) for v in y],
    }


def predict_knn_regressor(params, X) -> np.ndarray:
    train = np.asarray(params["train"], dtype=np.float64)
    targets = np.asarray(params["targets"], dtype=np.float64)
    out = np.empty(len(X), dtype=np.float64)
    for i, q in enumerate(X):
        nbr = nearest_indices(train, q, params["k"])
        out[i] = targets[nbr].mean()
    return out


def fit_regression_tree(X, y, hp, seed) -> dict:
    nodes = grow_tree(X, np.asarray(y, dtype=np.float64), VARIANCE, hp.get("maxDepth"))
    return {"nodes": nodes.to_doc()}


def predict_regression_tree(params, X) -> np.ndarray:
    return predict_tree(TreeNodes.from_doc(params["nodes"]), X)


FAMILIES = {
    "meanBaseline": (fit_mean, predict_mean),
    "ridgeRegression": (fit_ridge, predict_ridge),
    "kNNRegressor": (fit_knn_regressor, predict_knn_regressor),
    "regressionTree": (fit_regression_tree, predict_regression_tree),
}
