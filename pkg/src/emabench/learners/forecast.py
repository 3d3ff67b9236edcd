"""Forecasting families over a single target series in time order.

A fitted model carries exactly the state it needs to roll the series
forward; prediction takes a horizon (one value per requested step).
"""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateTrainingError


def fit_naive_last(series, hp, seed) -> dict:
    return {"lastValue": float(series[-1])}


def predict_naive_last(params, horizon: int) -> np.ndarray:
    return np.full(horizon, params["lastValue"], dtype=np.float64)


def fit_seasonal_naive(series, hp, seed) -> dict:
    period = int(hp["period"])
    if period < 1:
        raise DegenerateTrainingError(f"seasonal period must be >= 1, got {period}")
    if len(series) < period:
        raise DegenerateTrainingError(
            f"series of length {len(series)} shorter than seasonal period {period}"
        )
    return {"period": period, "tail": [float(v) for v in series[-period:]]}


def predict_seasonal_naive(params, horizon: int) -> np.ndarray:
    tail = params["tail"]
    period = params["period"]
    return np.asarray([tail[h % period] for h in range(horizon)], dtype=np.float64)


def fit_autoregressive(series, hp, seed) -> dict:
    """AR(p) with intercept by least squares on the lag design matrix."""
    p = int(hp["p"])
    x = np.asarray(series, dtype=np.float64)
    n = len(x)
    if n < 2 * p + 1:
        raise DegenerateTrainingError(
            f"series of length {n} too short to fit {p + 1} AR coefficients"
        )
    rows = n - p
    design = np.ones((rows, p + 1), dtype=np.float64)
    for lag in range(1, p + 1):
        design[:, lag] = x[p - lag : n - lag]
    target = x[p:]
    beta, *_ = np.linalg.lstsq(design, target, rcond=None)
    return {
        "p": p,
        "intercept": float(beta[0]),
        "coefficients": [float(b) for b in beta[1:]],  # lag 1 first
        "history": [float(v) for v in x[-p:]],
    }


def predict_autoregressive(params, horizon: int) -> np.ndarray:
    coefs = params["coefficients"]
    history = list(params["history"])  # oldest -> newest
    out = np.empty(horizon, dtype=np.float64)
    for h in range(horizon):
        value = params["intercept"]
        for lag, coef in enumerate(coefs, start=1):
            value += coef * history[-lag]
        history.append(value)
        out[h] = value
    return out


FAMILIES = {
    "naiveLast": (fit_naive_last, predict_naive_last),
    "seasonalNaive": (fit_seasonal_naive, predict_seasonal_naive),
    "autoregressive": (fit_autoregressive, predict_autoregressive),
}
