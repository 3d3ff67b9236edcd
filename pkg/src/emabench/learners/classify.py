"""Classification families: baselines through bagged trees.

Labels are plain strings; every tie anywhere (majority vote, posterior
argmax, forest vote) resolves deterministically, documented per family.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from .neighbors import nearest_indices
from .tree import GINI, TreeNodes, grow_tree, predict_tree

_VAR_FLOOR = 1e-9


def _labels_array(labels: list[str]) -> np.ndarray:
    return np.asarray(labels, dtype=object)


# majorityBaseline: constant most-frequent label, ties to the smallest label


def fit_majority(X, labels, hp, seed) -> dict:
    counts = Counter(labels)
    top = max(counts.values())
    return {"label": min(l for l, c in counts.items() if c == top)}


def predict_majority(params, X) -> np.ndarray:
    return np.asarray([params["label"]] * len(X), dtype=object)


# gaussianNaiveBayes: per-class feature Gaussians with a variance floor


def fit_gaussian_nb(X, labels, hp, seed) -> dict:
    y = _labels_array(labels)
    classes = sorted(set(labels))
    priors, means, variances = [], [], []
    for cls in classes:
        rows = X[y == cls]
        priors.append(len(rows) / len(y))
        means.append(rows.mean(axis=0).tolist())
        variances.append((rows.var(axis=0) + _VAR_FLOOR).tolist())
    return {"classes": classes, "priors": priors, "means": means, "variances": variances}


def predict_gaussian_nb(params, X) -> np.ndarray:
    classes = params["classes"]
    scores = np.empty((len(X), len(classes)), dtype=np.float64)
    for j, _ in enumerate(classes):
        mean = np.asarray(params["means"][j])
        var = np.asarray(params["variances"][j])
        log_lik = -0.5 * (np.log(2.0 * np.pi * var) + (X - mean) ** 2 / var)
        scores[:, j] = np.log(params["priors"][j]) + log_lik.sum(axis=1)
    # argmax keeps the first maximum: ties go to the lexicographically
    # smallest class since `classes` is sorted
    picks = np.argmax(scores, axis=1)
    return np.asarray([classes[j] for j in picks], dtype=object)


# kNearestNeighbors: Euclidean on the standardized matrix; neighbor ties by
# lower rowId, vote ties by the nearest neighbor among the tied labels


def fit_knn(X, labels, hp, seed) -> dict:
    return {"k": int(hp["k"]), "train": X.tolist(), "labels": list(labels)}


def vote(neighbor_labels: list[str]) -> str:
    counts = Counter(neighbor_labels)
    top = max(counts.values())
    for label in neighbor_labels:  # nearest-first order
        if counts[label] == top:
            return label
    raise AssertionError("unreachable")


def predict_knn(params, X) -> np.ndarray:
    train = np.asarray(params["train"], dtype=np.float64)
    labels = params["labels"]
    k = params["k"]
    out = np.empty(len(X), dtype=object)
    for i, q in enumerate(X):
        nbr = nearest_indices(train, q, k)
        out[i] = vote([labels[j] for j in nbr])
    return out


# decisionTree / randomForest


def fit_decision_tree(X, labels, hp, seed) -> dict:
    classes = sorted(set(labels))
    codes = np.asarray([classes.index(l) for l in labels])
    nodes = grow_tree(X, codes, GINI, hp.get("maxDepth"), n_classes=len(classes))
    return {"classes": classes, "nodes": nodes.to_doc()}


def predict_decision_tree(params, X) -> np.ndarray:
    nodes = TreeNodes.from_doc(params["nodes"])
    codes = predict_tree(nodes, X).astype(int)
    classes = params["classes"]
    return np.asarray([classes[c] for c in codes], dtype=object)


def fit_random_forest(X, labels, hp, seed) -> dict:
    """Bagging of full-feature trees; bootstrap draws come from the seed."""
    classes = sorted(set(labels))
    codes = np.asarray([classes.index(l) for l in labels])
    rng = np.random.default_rng(seed)
    trees = []
    n = len(codes)
    for _ in range(int(hp["trees"])):
        idx = rng.integers(0, n, size=n)
        nodes = grow_tree(
            X[idx], codes[idx], GINI, hp.get("maxDepth"), n_classes=len(classes)
        )
        trees.append(nodes.to_doc())
    return {"classes": classes, "trees": trees}


def predict_random_forest(params, X) -> np.ndarray:
    classes = params["classes"]
    votes = np.zeros((len(X), len(classes)), dtype=np.int64)
    for doc in params["trees"]:
        codes = predict_tree(TreeNodes.from_doc(doc), X).astype(int)
        votes[np.arange(len(X)), codes] += 1
    # first maximum -> lowest class code -> lexicographically smallest label
    picks = np.argmax(votes, axis=1)
    return np.asarray([classes[j] for j in picks], dtype=object)


FAMILIES = {
    "majorityBaseline": (fit_majority, predict_majority),
    "gaussianNaiveBayes": (fit_gaussian_nb, predict_gaussian_nb),
    "kNearestNeighbors": (fit_knn, predict_knn),
    "decisionTree": (fit_decision_tree, predict_decision_tree),
    "randomForest": (fit_random_forest, predict_random_forest),
}
