"""Seeded train/holdout splits, metric computation, and evaluation reports.

Reports are prediction-level: every holdout row appears in ``per_instance``
keyed by rowId, which is what powers cross-linking between model views and
data views.  Scores are always recomputable from the raw per-instance pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset import DatasetBundle
from .errors import MetricInputError, SpecInvalidError, SplitTooSmallError
from .learners import FittedModel, predict
from .problemgen import VALID_METRICS, ProblemSpec, TaskType

MIN_USABLE_ROWS = 10
DEFAULT_HOLDOUT_FRACTION = 0.25


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    strategy: str  # stratified | shuffled | temporalTail
    holdout_fraction: float
    train_row_ids: tuple[int, ...]
    holdout_row_ids: tuple[int, ...]
    fallback: Optional[str] = None  # set when stratification was impossible

    def to_doc(self) -> dict:
        return {
            "seed": self.seed,
            "strategy": self.strategy,
            "holdoutFraction": self.holdout_fraction,
            "trainRowIds": list(self.train_row_ids),
            "holdoutRowIds": list(self.holdout_row_ids),
            "fallback": self.fallback,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SplitPlan":
        return cls(
            seed=doc["seed"],
            strategy=doc["strategy"],
            holdout_fraction=doc["holdoutFraction"],
            train_row_ids=tuple(int(i) for i in doc["trainRowIds"]),
            holdout_row_ids=tuple(int(i) for i in doc["holdoutRowIds"]),
            fallback=doc["fallback"],
        )


def _holdout_size(n: int, fraction: float) -> int:
    return min(max(int(math.floor(n * fraction + 0.5)), 1), n - 1)


def make_split(
    bundle: DatasetBundle,
    spec: ProblemSpec,
    seed: int,
    holdout_fraction: float = DEFAULT_HOLDOUT_FRACTION,
) -> SplitPlan:
    """Deterministic split of the rows with a non-missing target.

    Strategy per task: classification stratifies by label (falling back to a
    plain shuffle when some class has fewer than two instances, with the
    fallback recorded); regression and collaborative filtering shuffle;
    forecasting holds out the temporal tail.
    """
    if not 0.0 < holdout_fraction < 1.0:
        raise SplitTooSmallError(
            f"holdoutFraction must be in (0,1), got {holdout_fraction}"
        )
    usable = [
        i for i, row in enumerate(bundle.rows) if row.get(spec.target) is not None
    ]
    if len(usable) < MIN_USABLE_ROWS:
        raise SplitTooSmallError(
            f"{len(usable)} rows with non-missing target {spec.target!r}; "
            f"need at least {MIN_USABLE_ROWS}"
        )

    if spec.task is TaskType.forecasting:
        h = _holdout_size(len(usable), holdout_fraction)
        train, holdout = usable[:-h], usable[-h:]
        return _plan(seed, "temporalTail", holdout_fraction, train, holdout)

    rng = np.random.default_rng(seed)
    if spec.task is TaskType.classification:
        by_label: dict[str, list[int]] = {}
        for i in usable:
            by_label.setdefault(bundle.rows[i][spec.target], []).append(i)
        tiny = sorted(l for l, ids in by_label.items() if len(ids) < 2)
        if not tiny:
            train: list[int] = []
            holdout: list[int] = []
            for label in sorted(by_label):
                ids = np.asarray(by_label[label])
                ids = ids[rng.permutation(len(ids))]
                h = _holdout_size(len(ids), holdout_fraction)
                holdout.extend(int(i) for i in ids[:h])
                train.extend(int(i) for i in ids[h:])
            return _plan(seed, "stratified", holdout_fraction, train, holdout)
        fallback = "classWithSingleInstance:" + ",".join(tiny)
    else:
        fallback = None

    ids = np.asarray(usable)
    ids = ids[rng.permutation(len(ids))]
    h = _holdout_size(len(ids), holdout_fraction)
    holdout = [int(i) for i in ids[:h]]
    train = [int(i) for i in ids[h:]]
    return _plan(seed, "shuffled", holdout_fraction, train, holdout, fallback)


def _plan(seed, strategy, fraction, train, holdout, fallback=None) -> SplitPlan:
    return SplitPlan(
        seed=seed,
        strategy=strategy,
        holdout_fraction=fraction,
        train_row_ids=tuple(sorted(train)),
        holdout_row_ids=tuple(sorted(holdout)),
        fallback=fallback,
    )


# --- metrics ----------------------------------------------------------------


def _check_vectors(truth, predictions) -> None:
    if len(truth) != len(predictions):
        raise MetricInputError(
            f"length mismatch: truth {len(truth)}, predictions {len(predictions)}"
        )
    if len(truth) == 0:
        raise MetricInputError("empty vectors")


def _metric_labels(truth, predictions) -> list:
    return sorted(set(truth) | set(predictions))


def _per_class_table(truth, predictions) -> dict:
    """precision/recall/f1 per label; 0/0 cases are defined as 0."""
    out = {}
    for label in _metric_labels(truth, predictions):
        tp = sum(1 for t, p in zip(truth, predictions) if t == label and p == label)
        fp = sum(1 for t, p in zip(truth, predictions) if t != label and p == label)
        fn = sum(1 for t, p in zip(truth, predictions) if t == label and p != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[label] = {"precision": precision, "recall": recall, "f1": f1}
    return out


def compute_metric(metric: str, truth, predictions) -> float:
    """Standard definitions; macro variants average per-class values unweighted."""
    _check_vectors(truth, predictions)
    if metric == "accuracy":
        return sum(1 for t, p in zip(truth, predictions) if t == p) / len(truth)
    if metric in ("f1Macro", "precisionMacro", "recallMacro"):
        key = {"f1Macro": "f1", "precisionMacro": "precision", "recallMacro": "recall"}[
            metric
        ]
        table = _per_class_table(truth, predictions)
        return float(np.mean([row[key] for row in table.values()]))

    t = np.asarray(truth, dtype=np.float64)
    p = np.asarray(predictions, dtype=np.float64)
    if metric == "mse":
        return float(np.mean((p - t) ** 2))
    if metric == "rmse":
        return float(np.sqrt(np.mean((p - t) ** 2)))
    if metric == "mae":
        return float(np.mean(np.abs(p - t)))
    if metric == "r2":
        ss_tot = float(((t - t.mean()) ** 2).sum())
        if ss_tot == 0.0:
            return 0.0  # constant truth: r2 undefined, reported as 0 and flagged
        return 1.0 - float(((p - t) ** 2).sum()) / ss_tot
    if metric == "mape":
        mask = t != 0.0
        if not mask.any():
            return 0.0  # every truth point skipped; flagged in the report
        return float(np.mean(np.abs((p[mask] - t[mask]) / t[mask])))
    raise MetricInputError(f"unknown metric: {metric}")


@dataclass
class ConfusionMatrix:
    labels: list
    cells: list  # cells[i][j] = count(truth=labels[i], predicted=labels[j])

    def to_doc(self) -> dict:
        return {"labels": list(self.labels), "cells": [list(r) for r in self.cells]}


def confusion_matrix(truth, predictions) -> ConfusionMatrix:
    labels = _metric_labels(truth, predictions)
    index = {l: i for i, l in enumerate(labels)}
    cells = [[0] * len(labels) for _ in labels]
    for t, p in zip(truth, predictions):
        cells[index[t]][index[p]] += 1
    return ConfusionMatrix(labels=labels, cells=cells)


@dataclass
class EvalReport:
    candidate_id: str
    task: TaskType
    per_instance: list  # {"rowId", "truth", "prediction", "residual"?}
    scores: dict
    confusion: Optional[ConfusionMatrix] = None
    per_class: Optional[dict] = None
    flags: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "candidateId": self.candidate_id,
            "task": self.task.value,
            "perInstance": self.per_instance,
            "scores": self.scores,
            "confusion": self.confusion.to_doc() if self.confusion else None,
            "perClassScores": self.per_class,
            "flags": self.flags,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "EvalReport":
        confusion = doc.get("confusion")
        return cls(
            candidate_id=doc["candidateId"],
            task=TaskType(doc["task"]),
            per_instance=doc["perInstance"],
            scores=doc["scores"],
            confusion=ConfusionMatrix(confusion["labels"], confusion["cells"])
            if confusion
            else None,
            per_class=doc.get("perClassScores"),
            flags=doc.get("flags", {}),
        )


def build_report(
    model: FittedModel,
    split: SplitPlan,
    spec: ProblemSpec,
    bundle: DatasetBundle,
    candidate_id: str = "",
) -> EvalReport:
    """Evaluate a fitted model on the holdout rows of its split.

    Every metric valid for the task is computed (ranking uses one, comparing
    models often needs the others).  Classification additionally gets the
    confusion matrix and per-class precision/recall/f1.
    """
    if model.spec_id != spec.id:
        raise SpecInvalidError(["modelSpecMismatch"])
    records = bundle.records(list(split.holdout_row_ids))
    predictions = predict(model, records)
    truth = [bundle.rows[i][spec.target] for i in split.holdout_row_ids]

    numeric = spec.task is not TaskType.classification
    per_instance = []
    for row_id, t, p in zip(split.holdout_row_ids, truth, predictions):
        entry = {"rowId": int(row_id), "truth": t, "prediction": _plain(p)}
        if numeric:
            entry["residual"] = float(p) - float(t)
        per_instance.append(entry)

    flags: dict = {}
    scores = {}
    for metric in VALID_METRICS[spec.task]:
        scores[metric] = compute_metric(metric, truth, list(predictions))
    if numeric:
        t = np.asarray(truth, dtype=np.float64)
        if "r2" in scores and float(((t - t.mean()) ** 2).sum()) == 0.0:
            flags["r2ConstantTruth"] = True
        if "mape" in scores:
            skipped = int((t == 0.0).sum())
            if skipped:
                flags["mapeSkippedZeroTruth"] = skipped

    confusion = per_class = None
    if spec.task is TaskType.classification:
        confusion = confusion_matrix(truth, list(predictions))
        per_class = _per_class_table(truth, list(predictions))

    return EvalReport(
        candidate_id=candidate_id,
        task=spec.task,
        per_instance=per_instance,
        scores=scores,
        confusion=confusion,
        per_class=per_class,
        flags=flags,
    )


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    return value
