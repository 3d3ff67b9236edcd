"""Problem-specification enumeration, refinement, and validation.

A problem spec is the tuple (target, task type, feature list, metric) plus
provenance.  Enumeration walks the bundle's columns in declared order and
emits one spec per (eligible target, task, metric) combination, so repeated
calls are byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .canonical import short_hash
from .dataset import DatasetBundle
from .errors import SpecInvalidError

#: categorical targets above this label count are ineligible for enumeration
MAX_CLASS_LABELS = 50


class TaskType(str, Enum):
    classification = "classification"
    regression = "regression"
    forecasting = "forecasting"
    collaborativeFiltering = "collaborativeFiltering"


#: metric validity per task, in canonical enumeration order
VALID_METRICS: dict[TaskType, tuple[str, ...]] = {
    TaskType.classification: ("accuracy", "f1Macro", "precisionMacro", "recallMacro"),
    TaskType.regression: ("mse", "rmse", "mae", "r2"),
    TaskType.forecasting: ("rmse", "mae", "mape"),
    TaskType.collaborativeFiltering: ("mse", "rmse", "mae", "r2"),
}

#: metrics used when auto-generating specs (r2 stays valid for ratings tasks
#: but is not enumerated, keeping three generated specs per ratings target)
ENUMERATED_METRICS: dict[TaskType, tuple[str, ...]] = {
    TaskType.classification: VALID_METRICS[TaskType.classification],
    TaskType.regression: VALID_METRICS[TaskType.regression],
    TaskType.forecasting: VALID_METRICS[TaskType.forecasting],
    TaskType.collaborativeFiltering: ("mse", "rmse", "mae"),
}

_HIGHER_IS_BETTER = {"accuracy", "f1Macro", "precisionMacro", "recallMacro", "r2"}


def higher_is_better(metric: str) -> bool:
    return metric in _HIGHER_IS_BETTER


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    dataset_id: str
    task: TaskType
    target: str
    features: tuple[str, ...]
    metric: str
    provenance: str  # "generated" | "userCreated" | "refinedFrom:<specId>"

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "datasetId": self.dataset_id,
            "taskType": self.task.value,
            "target": self.target,
            "features": list(self.features),
            "metric": self.metric,
            "provenance": self.provenance,
        }


def _spec_id(dataset_id, task, target, features, metric, provenance) -> str:
    return short_hash(
        {
            "datasetId": dataset_id,
            "taskType": task.value,
            "target": target,
            "features": list(features),
            "metric": metric,
            "provenance": provenance,
        },
        "spec",
    )


def _make_spec(dataset_id, task, target, features, metric, provenance) -> ProblemSpec:
    return ProblemSpec(
        id=_spec_id(dataset_id, task, target, features, metric, provenance),
        dataset_id=dataset_id,
        task=task,
        target=target,
        features=tuple(features),
        metric=metric,
        provenance=provenance,
    )


def eligible_feature_columns(bundle: DatasetBundle, target: str) -> list[str]:
    """Default feature set: every column except the target and id-like kinds."""
    return [
        c.name
        for c in bundle.columns
        if c.name != target and c.kind not in ("key", "reference")
    ]


def _classification_eligible(bundle: DatasetBundle, name: str) -> bool:
    col = bundle.column(name)
    if col.kind != "categorical":
        return False
    return bundle.distinct_count(name) <= MAX_CLASS_LABELS


def validate_spec_fields(
    bundle: DatasetBundle,
    task: TaskType,
    target: str,
    features: tuple[str, ...],
    metric: str,
) -> list[str]:
    """Every violated invariant, by name; empty list when the spec is valid."""
    violations: list[str] = []
    known = set(bundle.column_names)

    if target not in known:
        violations.append("unknownTargetColumn")
    unknown_feats = [f for f in features if f not in known]
    if unknown_feats:
        violations.append("unknownFeatureColumn")
    if len(set(features)) != len(features):
        violations.append("duplicateFeature")
    if not features:
        violations.append("emptyFeatures")
    if target in features:
        violations.append("targetInFeatures")
    if metric not in VALID_METRICS[task]:
        violations.append("metricTaskMismatch")

    id_kinds = ("key", "reference")
    if target in known and bundle.column(target).kind in id_kinds:
        violations.append("identifierTarget")
    if any(f in known and bundle.column(f).kind in id_kinds for f in features):
        violations.append("identifierFeature")

    if target in known:
        kind = bundle.column(target).kind
        if task is TaskType.classification:
            if kind != "categorical":
                violations.append("targetKindMismatch")
            elif bundle.distinct_count(target) > MAX_CLASS_LABELS:
                violations.append("tooManyClassLabels")
        elif task in (
            TaskType.regression,
            TaskType.forecasting,
            TaskType.collaborativeFiltering,
        ):
            if kind != "numeric":
                violations.append("targetKindMismatch")

    if task is TaskType.forecasting and bundle.resource_shape != "timeseries":
        violations.append("shapeTaskMismatch")
    if (
        task is TaskType.collaborativeFiltering
        and bundle.resource_shape != "ratingsTriple"
    ):
        violations.append("shapeTaskMismatch")

    return violations


def _checked(bundle: DatasetBundle, spec: ProblemSpec) -> ProblemSpec:
    violations = validate_spec_fields(
        bundle, spec.task, spec.target, spec.features, spec.metric
    )
    if violations:
        raise SpecInvalidError(violations)
    return spec


def enumerate_specs(bundle: DatasetBundle) -> list[ProblemSpec]:
    """Auto-generate every valid spec: one per (target, task, metric).

    Walks columns in declared order; for each column, applicable tasks in
    enum order, then metrics in canonical order.  Pure function of the
    bundle, so output is byte-identical across calls.
    """
    specs: list[ProblemSpec] = []
    for col in bundle.columns:
        tasks: list[TaskType] = []
        if col.kind == "categorical" and _classification_eligible(bundle, col.name):
            tasks.append(TaskType.classification)
        if col.kind == "numeric":
            tasks.append(TaskType.regression)
            if bundle.resource_shape == "timeseries":
                tasks.append(TaskType.forecasting)
            if bundle.resource_shape == "ratingsTriple":
                tasks.append(TaskType.collaborativeFiltering)
        for task in tasks:
            features = _default_features(bundle, task, col.name)
            if not features:
                continue
            for metric in ENUMERATED_METRICS[task]:
                specs.append(
                    _make_spec(
                        bundle.id, task, col.name, features, metric, "generated"
                    )
                )
    return specs


def _default_features(bundle: DatasetBundle, task: TaskType, target: str) -> list[str]:
    if task is TaskType.forecasting:
        dt = bundle.datetime_column()
        return [dt] if dt else []
    if task is TaskType.collaborativeFiltering:
        return [c.name for c in bundle.columns if c.kind == "categorical"]
    return eligible_feature_columns(bundle, target)


def create_spec(bundle: DatasetBundle, fields: dict) -> ProblemSpec:
    """Build a user-authored spec; every invariant violation reported by name."""
    try:
        task = TaskType(fields.get("taskType"))
    except ValueError:
        raise SpecInvalidError(["unknownTaskType"]) from None
    spec = _make_spec(
        bundle.id,
        task,
        fields.get("target", ""),
        tuple(fields.get("features", ())),
        fields.get("metric", ""),
        "userCreated",
    )
    return _checked(bundle, spec)


def refine_spec(
    bundle: DatasetBundle,
    spec: ProblemSpec,
    remove_features: list[str] = (),
    set_metric: Optional[str] = None,
) -> ProblemSpec:
    """Derive a new spec by dropping features and/or swapping the metric.

    The result records provenance ``refinedFrom:<parent id>`` and is
    re-validated in full, so removing every feature or picking a metric
    invalid for the task is rejected.
    """
    removed = set(remove_features)
    features = tuple(f for f in spec.features if f not in removed)
    metric = set_metric if set_metric is not None else spec.metric
    provenance = f"refinedFrom:{spec.id}"
    refined = _make_spec(
        spec.dataset_id, spec.task, spec.target, features, metric, provenance
    )
    return _checked(bundle, refined)


def spec_from_doc(doc: dict) -> ProblemSpec:
    return ProblemSpec(
        id=doc["id"],
        dataset_id=doc["datasetId"],
        task=TaskType(doc["taskType"]),
        target=doc["target"],
        features=tuple(doc["features"]),
        metric=doc["metric"],
        provenance=doc["provenance"],
    )
