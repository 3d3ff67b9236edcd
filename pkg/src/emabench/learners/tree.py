"""Axis-aligned decision tree core shared by the tree and forest families.

Split search is vectorized across all features at once.  Tie-breaking is
fully deterministic: equal-impurity splits resolve to the lowest feature
index, then the lowest threshold.  Candidate thresholds are midpoints of
adjacent distinct sorted values.  A node splits whenever it is impure and
any valid candidate exists, even at zero impurity gain; the depth limit
bounds growth.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

GINI = "gini"
VARIANCE = "variance"


class TreeNodes:
    """Flat node arrays; index 0 is the root, children appended preorder."""

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_leaf(self, value: float) -> int:
        return self._add(-1, 0.0, -1, -1, value)

    def add_split(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, -1, -1, 0.0)

    def _add(self, f, t, l, r, v) -> int:
        self.feature.append(f)
        self.threshold.append(t)
        self.left.append(l)
        self.right.append(r)
        self.value.append(v)
        return len(self.feature) - 1

    def to_doc(self) -> dict:
        return {
            "feature": list(self.feature),
            "threshold": [float(t) for t in self.threshold],
            "left": list(self.left),
            "right": list(self.right),
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "TreeNodes":
        nodes = cls()
        nodes.feature = [int(f) for f in doc["feature"]]
        nodes.threshold = [float(t) for t in doc["threshold"]]
        nodes.left = [int(v) for v in doc["left"]]
        nodes.right = [int(v) for v in doc["right"]]
        nodes.value = [float(v) for v in doc["value"]]
        return nodes


def _best_split(X: np.ndarray, y: np.ndarray, mode: str, n_classes: int):
    """Best (feature, threshold) by impurity; None when no valid candidate.

    Ties: within a feature the first (lowest) threshold wins via argmin;
    across features the lowest index wins.
    """
    n, d = X.shape
    order = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, order, axis=0)
    valid = Xs[:-1] < Xs[1:]  # (n-1, d): split between positions i and i+1
    if not valid.any():
        return None

    nl = np.arange(1, n, dtype=np.float64)[:, None]
    nr = n - nl
    if mode == GINI:
        onehot = np.zeros((n, n_classes), dtype=np.float64)
        onehot[np.arange(n), y] = 1.0
        left_counts = np.cumsum(onehot[order], axis=0)[:-1]  # (n-1, d, k)
        total = onehot.sum(axis=0)
        right_counts = total[None, None, :] - left_counts
        impurity_left = 1.0 - (left_counts**2).sum(axis=2) / nl**2
        impurity_right = 1.0 - (right_counts**2).sum(axis=2) / nr**2
        weighted = (nl * impurity_left + nr * impurity_right) / n
    else:
        ys = y[order]  # (n, d)
        s1 = np.cumsum(ys, axis=0)[:-1]
        s2 = np.cumsum(ys**2, axis=0)[:-1]
        t1 = float(y.sum())
        t2 = float((y**2).sum())
        sse_left = s2 - s1**2 / nl
        sse_right = (t2 - s2) - (t1 - s1) ** 2 / nr
        weighted = (sse_left + sse_right) / n

    weighted = np.where(valid, weighted, np.inf)
    pos = np.argmin(weighted, axis=0)  # per feature, first = lowest threshold
    per_feature_best = weighted[pos, np.arange(d)]
    feat = int(np.argmin(per_feature_best))  # first = lowest feature index
    if not np.isfinite(per_feature_best[feat]):
        return None
    p = int(pos[feat])
    threshold = (Xs[p, feat] + Xs[p + 1, feat]) / 2.0
    return feat, float(threshold)


def _is_pure(y: np.ndarray, mode: str) -> bool:
    if mode == GINI:
        return bool((y == y[0]).all())
    return bool(y.max() == y.min())


def _leaf_value(y: np.ndarray, mode: str, n_classes: int) -> float:
    if mode == GINI:
        # majority class; argmax resolves ties to the lowest class code
        return float(np.argmax(np.bincount(y, minlength=n_classes)))
    return float(y.mean())


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    mode: str,
    max_depth: Optional[int],
    n_classes: int = 0,
) -> TreeNodes:
    """Build a tree on a float64 design matrix.

    ``y`` holds class codes (int) under GINI or float targets under VARIANCE.
    ``max_depth=None`` grows to purity.
    """
    nodes = TreeNodes()
    root_idx = np.arange(len(y))
    stack = [(root_idx, 0, -1, False)]  # (row indices, depth, parent, is_right)
    while stack:
        idx, depth, parent, is_right = stack.pop()
        yn = y[idx]
        split = None
        depth_ok = max_depth is None or depth < max_depth
        if depth_ok and idx.size >= 2 and not _is_pure(yn, mode):
            split = _best_split(X[idx], yn, mode, n_classes)
        if split is None:
            node = nodes.add_leaf(_leaf_value(yn, mode, n_classes))
        else:
            feat, threshold = split
            node = nodes.add_split(feat, threshold)
            mask = X[idx, feat] <= threshold
            # push right first so the left child is built (and numbered) first
            stack.append((idx[~mask], depth + 1, node, True))
            stack.append((idx[mask], depth + 1, node, False))
        if parent >= 0:
            if is_right:
                nodes.right[parent] = node
            else:
                nodes.left[parent] = node
    return nodes


def predict_tree(nodes: TreeNodes, X: np.ndarray) -> np.ndarray:
    """Vectorized root-to-leaf routing; returns leaf values per row."""
    feature = np.asarray(nodes.feature)
    threshold = np.asarray(nodes.threshold)
    left = np.asarray(nodes.left)
    right = np.asarray(nodes.right)
    value = np.asarray(nodes.value)

    n = X.shape[0]
    at = np.zeros(n, dtype=np.int64)
    while True:
        interior = feature[at] >= 0
        if not interior.any():
            break
        f = np.where(interior, feature[at], 0)
        go_left = X[np.arange(n), f] <= threshold[at]
        step = np.where(go_left, left[at], right[at])
        at = np.where(interior, step, at)
    return value[at]
