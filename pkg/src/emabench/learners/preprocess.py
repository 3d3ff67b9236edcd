"""Feature matrix construction shared by every tabular learner.

Pipeline steps (applied in descriptor order):

* ``dropMissingRows`` — drop training rows whose target is missing
* ``standardize``     — numeric/datetime features centered and scaled with
                        training statistics; missing values mean-imputed
                        (standardized value 0); zero-variance scale is 1
* ``oneHotEncode``    — categorical features expanded over training levels
                        in sorted order; unseen or missing levels encode as
                        an all-zeros block

The fitted state is plain JSON-able data so models round-trip exactly.
"""
from __future__ import annotations

import numpy as np

from ..dataset import epoch_seconds
from ..errors import MissingFeatureError

DEFAULT_TABULAR_STEPS = ("dropMissingRows", "standardize", "oneHotEncode")
SERIES_STEPS = ("dropMissingRows",)


def drop_missing_target(records: list[dict], target: str) -> list[dict]:
    return [r for r in records if r.get(target) is not None]


def _as_number(value) -> float:
    if isinstance(value, float):
        return value
    if isinstance(value, int):
        return float(value)
    return epoch_seconds(value)  # datetime feature


class FeatureCodec:
    """Record dicts -> float64 design matrix, with exact serialization."""

    def __init__(self, state: dict):
        self.state = state

    @classmethod
    def fit(cls, records: list[dict], features: list[str], kinds: dict[str, str]):
        cols = []
        for name in features:
            kind = kinds[name]
            if kind == "categorical":
                levels = sorted({r[name] for r in records if r.get(name) is not None})
                cols.append({"name": name, "kind": "categorical", "levels": levels})
            else:  # numeric or datetime
                present = [
                    _as_number(r[name]) for r in records if r.get(name) is not None
                ]
                if present:
                    arr = np.asarray(present, dtype=np.float64)
                    mean = float(arr.mean())
                    std = float(arr.std())
                else:
                    mean, std = 0.0, 0.0
                cols.append(
                    {
                        "name": name,
                        "kind": "number",
                        "mean": mean,
                        "scale": std if std > 0.0 else 1.0,
                    }
                )
        return cls({"columns": cols})

    @property
    def width(self) -> int:
        return sum(
            len(c["levels"]) if c["kind"] == "categorical" else 1
            for c in self.state["columns"]
        )

    def column_labels(self) -> list[str]:
        labels = []
        for col in self.state["columns"]:
            if col["kind"] == "categorical":
                labels.extend(f"{col['name']}={lv}" for lv in col["levels"])
            else:
                labels.append(col["name"])
        return labels

    def transform(self, records: list[dict]) -> np.ndarray:
        n = len(records)
        X = np.zeros((n, self.width), dtype=np.float64)
        j = 0
        for col in self.state["columns"]:
            name = col["name"]
            for rec in records:
                if name not in rec:
                    raise MissingFeatureError(f"feature column missing: {name}")
            if col["kind"] == "categorical":
                index = {lv: k for k, lv in enumerate(col["levels"])}
                for i, rec in enumerate(records):
                    k = index.get(rec[name])
                    if k is not None:  # unseen level stays all-zeros
                        X[i, j + k] = 1.0
                j += len(col["levels"])
            else:
                mean, scale = col["mean"], col["scale"]
                for i, rec in enumerate(records):
                    v = rec[name]
                    X[i, j] = 0.0 if v is None else (_as_number(v) - mean) / scale
                j += 1
        return X

    def to_doc(self) -> dict:
        return self.state

    @classmethod
    def from_doc(cls, doc: dict) -> "FeatureCodec":
        return cls(doc)
