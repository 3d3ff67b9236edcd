"""The model zoo: per-task estimator families with hyperparameter grids.

Every family is deterministic given (descriptor, training slice, seed); the
only randomness anywhere is the random forest's bootstrap, driven by the
seed.  This zoo is a deliberately desk-scale stand-in for a production
autoML backend: small grids, exact algorithms, exhaustively testable.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..dataset import DatasetBundle
from ..errors import DegenerateTrainingError, MissingFeatureError
from ..problemgen import ProblemSpec, TaskType
from . import classify, collab, forecast, regress
from .preprocess import DEFAULT_TABULAR_STEPS, SERIES_STEPS, FeatureCodec, drop_missing_target


@dataclass(frozen=True)
class PipelineDescriptor:
    family: str
    hyperparameters: dict
    preprocessing: tuple[str, ...]

    def to_doc(self) -> dict:
        return {
            "family": self.family,
            "hyperparameters": dict(self.hyperparameters),
            "preprocessing": list(self.preprocessing),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PipelineDescriptor":
        return cls(
            family=doc["family"],
            hyperparameters=dict(doc["hyperparameters"]),
            preprocessing=tuple(doc["preprocessing"]),
        )


@dataclass
class FittedModel:
    descriptor: PipelineDescriptor
    task: TaskType
    target: str
    features: tuple[str, ...]
    spec_id: str
    codec: Optional[FeatureCodec]
    params: dict
    train_row_ids: tuple[int, ...]
    training_seconds: float = 0.0  # wall-clock; never serialized

    def to_doc(self) -> dict:
        return {
            "descriptor": self.descriptor.to_doc(),
            "task": self.task.value,
            "target": self.target,
            "features": list(self.features),
            "specId": self.spec_id,
            "codec": self.codec.to_doc() if self.codec else None,
            "params": self.params,
            "trainRowIds": list(self.train_row_ids),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FittedModel":
        return cls(
            descriptor=PipelineDescriptor.from_doc(doc["descriptor"]),
            task=TaskType(doc["task"]),
            target=doc["target"],
            features=tuple(doc["features"]),
            spec_id=doc["specId"],
            codec=FeatureCodec.from_doc(doc["codec"]) if doc["codec"] else None,
            params=doc["params"],
            train_row_ids=tuple(int(i) for i in doc["trainRowIds"]),
        )


_KNN_KS = (1, 3, 5, 9)
_TREE_DEPTHS = (2, 4, 8)
_RIDGE_LAMBDAS = (0.0, 0.1, 1.0, 10.0)
_FOREST_SIZES = (25, 100)
_FOREST_DEPTHS = (4, 8)
_AR_ORDERS = (1, 2, 4, 8)
_BIAS_LAMBDAS = (0.1, 1.0, 10.0)


def families(
    task: TaskType, declared_season: Optional[int] = None
) -> list[tuple[str, list[dict]]]:
    """(family id, grid) pairs in canonical order; grids are explicit points.

    The seasonal-naive family only exists when the dataset declares a
    seasonal period.
    """
    if task is TaskType.classification:
        return [
            ("majorityBaseline", [{}]),
            ("gaussianNaiveBayes", [{}]),
            ("kNearestNeighbors", [{"k": k} for k in _KNN_KS]),
            ("decisionTree", [{"maxDepth": d} for d in _TREE_DEPTHS]),
            (
                "randomForest",
                [
                    {"trees": t, "maxDepth": d}
                    for t in _FOREST_SIZES
                    for d in _FOREST_DEPTHS
                ],
            ),
        ]
    if task is TaskType.regression:
        return [
            ("meanBaseline", [{}]),
            ("ridgeRegression", [{"lambda": l} for l in _RIDGE_LAMBDAS]),
            ("kNNRegressor", [{"k": k} for k in _KNN_KS]),
            ("regressionTree", [{"maxDepth": d} for d in _TREE_DEPTHS]),
        ]
    if task is TaskType.forecasting:
        out: list[tuple[str, list[dict]]] = [("naiveLast", [{}])]
        if declared_season is not None:
            out.append(("seasonalNaive", [{"period": int(declared_season)}]))
        out.append(("autoregressive", [{"p": p} for p in _AR_ORDERS]))
        return out
    return [
        ("globalMean", [{}]),
        ("biasModel", [{"lambda": l} for l in _BIAS_LAMBDAS]),
    ]


def default_descriptor(task: TaskType, family: str, hyperparameters: dict) -> PipelineDescriptor:
    steps = (
        DEFAULT_TABULAR_STEPS
        if task in (TaskType.classification, TaskType.regression)
        else SERIES_STEPS
    )
    return PipelineDescriptor(
        family=family, hyperparameters=dict(hyperparameters), preprocessing=steps
    )


_TABULAR_FAMILIES = {
    TaskType.classification: classify.FAMILIES,
    TaskType.regression: regress.FAMILIES,
}


def _family_fns(task: TaskType, family: str):
    table = {
        TaskType.classification: classify.FAMILIES,
        TaskType.regression: regress.FAMILIES,
        TaskType.forecasting: forecast.FAMILIES,
        TaskType.collaborativeFiltering: collab.FAMILIES,
    }[task]
    if family not in table:
        raise DegenerateTrainingError(
            f"family {family!r} is not in the {task.value} zoo"
        )
    return table[family]


def _check_features_present(records: list[dict], features: tuple[str, ...]) -> None:
    for rec in records:
        for name in features:
            if name not in rec:
                raise MissingFeatureError(f"feature column missing: {name}")


def _augment_ridge_params(params: dict, codec: FeatureCodec) -> dict:
    """Add original-unit coefficients next to standardized-space weights."""
    labels = codec.column_labels()
    weights = params["weights"]
    intercept = params["interceptTerm"]
    coefficients = {}
    for label, col_weight, col in zip(labels, weights, _codec_flat_columns(codec)):
        if col["kind"] == "number":
            coefficients[label] = col_weight / col["scale"]
            intercept -= col_weight * col["mean"] / col["scale"]
        else:
            coefficients[label] = col_weight
    return dict(params, coefficients=coefficients, intercept=float(intercept))


def _codec_flat_columns(codec: FeatureCodec) -> list[dict]:
    flat = []
    for col in codec.state["columns"]:
        if col["kind"] == "categorical":
            flat.extend([col] * len(col["levels"]))
        else:
            flat.append(col)
    return flat


def fit(
    descriptor: PipelineDescriptor,
    records: list[dict],
    spec: ProblemSpec,
    kinds: dict[str, str],
    seed: int,
) -> FittedModel:
    """Fit one pipeline on a training slice (records in rowId/time order).

    ``kinds`` maps every referenced column name to its declared kind.
    Deterministic given (descriptor, records, seed).
    """
    started = time.perf_counter()
    if "dropMissingRows" in descriptor.preprocessing:
        records = drop_missing_target(records, spec.target)
    if not records:
        raise DegenerateTrainingError("zero training rows after preprocessing")
    _check_features_present(records, spec.features)

    train_row_ids = tuple(int(r["rowId"]) for r in records if "rowId" in r)
    fit_fn, _ = _family_fns(spec.task, descriptor.family)
    codec = None

    if spec.task in _TABULAR_FAMILIES:
        codec = FeatureCodec.fit(records, list(spec.features), kinds)
        X = codec.transform(records)
        if spec.task is TaskType.classification:
            y = [r[spec.target] for r in records]
        else:
            y = np.asarray([r[spec.target] for r in records], dtype=np.float64)
        params = fit_fn(X, y, descriptor.hyperparameters, seed)
        if descriptor.family == "ridgeRegression":
            params = _augment_ridge_params(params, codec)
    elif spec.task is TaskType.forecasting:
        series = [float(r[spec.target]) for r in records]
        params = fit_fn(series, descriptor.hyperparameters, seed)
    else:  # collaborative filtering
        user_col, item_col = spec.features[0], spec.features[1]
        users = [r[user_col] for r in records]
        items = [r[item_col] for r in records]
        ratings = [float(r[spec.target]) for r in records]
        params = fit_fn(users, items, ratings, descriptor.hyperparameters, seed)

    return FittedModel(
        descriptor=descriptor,
        task=spec.task,
        target=spec.target,
        features=spec.features,
        spec_id=spec.id,
        codec=codec,
        params=params,
        train_row_ids=train_row_ids,
        training_seconds=time.perf_counter() - started,
    )


def predict(model: FittedModel, records: list[dict]) -> np.ndarray:
    """One prediction per record; forecasting treats len(records) as horizon."""
    _, predict_fn = _family_fns(model.task, model.descriptor.family)
    if model.task in _TABULAR_FAMILIES:
        X = model.codec.transform(records)
        return predict_fn(model.params, X)
    if model.task is TaskType.forecasting:
        _check_features_present(records, model.features)
        return predict_fn(model.params, len(records))
    _check_features_present(records, model.features)
    user_col, item_col = model.features[0], model.features[1]
    users = [r[user_col] for r in records]
    items = [r[item_col] for r in records]
    return predict_fn(model.params, users, items)


def kinds_for(bundle: DatasetBundle) -> dict[str, str]:
    return {c.name: c.kind for c in bundle.columns}
