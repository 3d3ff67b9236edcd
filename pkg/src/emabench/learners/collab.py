"""Collaborative-filtering families over (user, item, rating) triples."""
from __future__ import annotations

import numpy as np

_SWEEPS = 20  # fixed alternating-update count for the bias model


def fit_global_mean(users, items, ratings, hp, seed) -> dict:
    return {"mu": float(np.mean(ratings))}


def predict_global_mean(params, users, items) -> np.ndarray:
    return np.full(len(users), params["mu"], dtype=np.float64)


def fit_bias_model(users, items, ratings, hp, seed) -> dict:
    """rating ~ mu + b_user + b_item, ridge-damped alternating updates."""
    lam = float(hp["lambda"])
    r = np.asarray(ratings, dtype=np.float64)
    mu = float(r.mean())

    user_levels = sorted(set(users))
    item_levels = sorted(set(items))
    u_index = {u: i for i, u in enumerate(user_levels)}
    i_index = {v: i for i, v in enumerate(item_levels)}
    u = np.asarray([u_index[x] for x in users])
    v = np.asarray([i_index[x] for x in items])
    u_count = np.bincount(u, minlength=len(user_levels)).astype(np.float64)
    i_count = np.bincount(v, minlength=len(item_levels)).astype(np.float64)

    b_user = np.zeros(len(user_levels))
    b_item = np.zeros(len(item_levels))
    for _ in range(_SWEEPS):
        resid = r - mu - b_item[v]
        b_user = np.bincount(u, weights=resid, minlength=len(user_levels)) / (
            lam + u_count
        )
        resid = r - mu - b_user[u]
        b_item = np.bincount(v, weights=resid, minlength=len(item_levels)) / (
            lam + i_count
        )
    return {
        "mu": mu,
        "lambda": lam,
        "userLevels": user_levels,
        "userBias": b_user.tolist(),
        "itemLevels": item_levels,
        "itemBias": b_item.tolist(),
    }


def predict_bias_model(params, users, items) -> np.ndarray:
    u_bias = dict(zip(params["userLevels"], params["userBias"]))
    i_bias = dict(zip(params["itemLevels"], params["itemBias"]))
    mu = params["mu"]
    return np.asarray(
        [mu + u_bias.get(u, 0.0) + i_bias.get(i, 0.0) for u, i in zip(users, items)],
        dtype=np.float64,
    )


FAMILIES = {
    "globalMean": (fit_global_mean, predict_global_mean),
    "biasModel": (fit_bias_model, predict_bias_model),
}
