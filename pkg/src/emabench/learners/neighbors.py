"""Shared k-nearest-neighbor search with deterministic tie handling."""
from __future__ import annotations

import numpy as np


def nearest_indices(train: np.ndarray, query: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest training rows, nearest first.

    Squared Euclidean distance; distance ties resolve to the lower training
    index (training rows are kept in rowId order, so lower index means lower
    rowId).  k is clamped to the training size.
    """
    d2 = ((train - query) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")
    return order[: min(k, len(train))]
