"""Schema-annotated dataset ingestion, summary cards, and row selection.

Column kinds are declared in a sidecar schema document and never inferred.
A bundle is immutable after ingest; rows are keyed by a dense integer rowId
(0..n-1 in file order) which every downstream view uses for cross-linking.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Optional

import numpy as np

from .canonical import short_hash
from .errors import (
    BadSelectorError,
    DuplicateColumnError,
    EmptyDatasetError,
    SchemaMismatchError,
    UnknownColumnError,
    ValueParseError,
)

KINDS = ("categorical", "numeric", "datetime", "key", "reference")
SHAPES = ("tabular", "timeseries", "ratingsTriple")

DEFAULT_BIN_COUNT = 10

_EPOCH_NAIVE = datetime(1970, 1, 1)
_EPOCH_UTC = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    unit: Optional[str] = None

    def to_doc(self) -> dict:
        doc: dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.unit is not None:
            doc["unit"] = self.unit
        return doc


@dataclass(frozen=True)
class DatasetMeta:
    name: str = ""
    description: str = ""
    source: str = ""
    #: declared seasonality period (rows per cycle) for time-series data
    season: Optional[int] = None

    def to_doc(self) -> dict:
        doc: dict[str, Any] = {
            "name": self.name,
            "description": self.description,
            "source": self.source,
        }
        if self.season is not None:
            doc["season"] = self.season
        return doc


@dataclass
class DatasetBundle:
    """Immutable parsed table + declared schemas; the row-id source of truth."""

    id: str
    meta: DatasetMeta
    columns: list[ColumnSchema]
    rows: list[dict]  # column name -> value (None marks a missing cell)
    resource_shape: str

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> ColumnSchema:
        for col in self.columns:
            if col.name == name:
                return col
        raise UnknownColumnError(f"unknown column: {name}")

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def values(self, name: str) -> list:
        self.column(name)
        return [row[name] for row in self.rows]

    def records(self, row_ids: Optional[list[int]] = None) -> list[dict]:
        """Row dicts (with ``rowId`` injected) for the given ids, in order."""
        if row_ids is None:
            row_ids = list(range(len(self.rows)))
        out = []
        for rid in row_ids:
            rec = dict(self.rows[rid])
            rec["rowId"] = rid
            out.append(rec)
        return out

    def datetime_column(self) -> Optional[str]:
        for col in self.columns:
            if col.kind == "datetime":
                return col.name
        return None

    def distinct_count(self, name: str) -> int:
        return len({v for v in self.values(name) if v is not None})


def parse_value(token: str, kind: str, row_id: int, column: str):
    """Parse one CSV cell under its declared kind; '' is the missing marker."""
    if token == "":
        return None
    if kind == "numeric":
        try:
            value = float(token)
        except ValueError:
            value = math.nan
        if not math.isfinite(value):
            raise ValueParseError(
                f"value {token!r} in column {column!r} at row {row_id} "
                "is not a finite number",
                row_id=row_id,
                column=column,
            )
        return value
    if kind == "datetime":
        text = token[:-1] + "+00:00" if token.endswith("Z") else token
        try:
            return datetime.fromisoformat(text)
        except ValueError:
            raise ValueParseError(
                f"value {token!r} in column {column!r} at row {row_id} "
                "is not ISO-8601",
                row_id=row_id,
                column=column,
            ) from None
    # categorical, key, reference stay as text
    return token


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, datetime):
        return value.isoformat()
    return str(value)


def epoch_seconds(value: datetime) -> float:
    """Timezone-independent epoch seconds (naive datetimes use a naive epoch)."""
    ref = _EPOCH_UTC if value.tzinfo is not None else _EPOCH_NAIVE
    return (value - ref).total_seconds()


def _check_shape(columns: list[ColumnSchema], rows: list[dict], shape: str) -> None:
    if shape not in SHAPES:
        raise SchemaMismatchError(
            f"unknown resourceShape {shape!r}; expected one of {SHAPES}"
        )
    key_cols = [c for c in columns if c.kind == "key"]
    if len(key_cols) > 1:
        raise SchemaMismatchError(
            "at most one column may have kind=key; found "
            + ", ".join(c.name for c in key_cols)
        )
    if shape == "timeseries":
        dt_cols = [c for c in columns if c.kind == "datetime"]
        if len(dt_cols) != 1:
            raise SchemaMismatchError(
                "timeseries shape requires exactly one datetime column; "
                f"found {len(dt_cols)}"
            )
        name = dt_cols[0].name
        stamps = [r[name] for r in rows if r[name] is not None]
        try:
            ordered = all(a <= b for a, b in zip(stamps, stamps[1:]))
        except TypeError:
            raise SchemaMismatchError(
                f"datetime column {name!r} mixes naive and zone-aware values"
            ) from None
        if not ordered:
            raise SchemaMismatchError(
                f"timeseries shape requires column {name!r} sorted nondecreasing"
            )
    if shape == "ratingsTriple":
        kinds = sorted(c.kind for c in columns)
        if kinds != ["categorical", "categorical", "numeric"]:
            raise SchemaMismatchError(
                "ratingsTriple shape requires exactly two categorical columns "
                f"and one numeric column; got kinds {kinds}"
            )


def ingest(csv_bytes, schema_doc: dict) -> DatasetBundle:
    """Parse a CSV byte stream under a declared schema into a bundle.

    The schema document must list every header column with its kind.  Values
    are parsed strictly per kind; empty cells become missing markers, never
    zeros.
    """
    if isinstance(csv_bytes, bytes):
        text = csv_bytes.decode("utf-8")
    else:
        text = csv_bytes
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("empty dataset: file has no header row") from None

    dupes = [name for name, count in Counter(header).items() if count > 1]
    if dupes:
        raise DuplicateColumnError(
            "duplicate column names in header: " + ", ".join(sorted(dupes))
        )

    declared = schema_doc.get("columns", [])
    by_name = {}
    for entry in declared:
        name = entry.get("name")
        kind = entry.get("kind")
        if kind not in KINDS:
            raise SchemaMismatchError(
                f"column {name!r} declares unknown kind {kind!r}; "
                f"expected one of {KINDS}"
            )
        if name in by_name:
            raise DuplicateColumnError(f"schema lists column {name!r} twice")
        by_name[name] = ColumnSchema(name=name, kind=kind, unit=entry.get("unit"))

    missing = [name for name in header if name not in by_name]
    extra = [name for name in by_name if name not in header]
    if missing or extra:
        raise SchemaMismatchError(
            "header/schema mismatch"
            + (f"; header columns without schema: {missing}" if missing else "")
            + (f"; schema columns not in header: {extra}" if extra else "")
        )

    columns = [by_name[name] for name in header]  # bundle order = header order

    rows: list[dict] = []
    for row_id, raw in enumerate(reader):
        if not raw:  # blank line: a row of all-missing cells
            raw = [""] * len(header)
        if len(raw) != len(header):
            raise SchemaMismatchError(
                f"row {row_id} has {len(raw)} cells, header has {len(header)}"
            )
        row = {
            col.name: parse_value(tok, col.kind, row_id, col.name)
            for col, tok in zip(columns, raw)
        }
        rows.append(row)

    if not rows:
        raise EmptyDatasetError("empty dataset: header only, zero data rows")

    shape = schema_doc.get("resourceShape", "tabular")
    _check_shape(columns, rows, shape)

    season = schema_doc.get("season")
    meta = DatasetMeta(
        name=schema_doc.get("name", ""),
        description=schema_doc.get("description", ""),
        source=schema_doc.get("source", ""),
        season=int(season) if season is not None else None,
    )
    content = {
        "meta": meta.to_doc(),
        "resourceShape": shape,
        "columns": [c.to_doc() for c in columns],
        "rows": [[format_value(r[c.name]) for c in columns] for r in rows],
    }
    return DatasetBundle(
        id=short_hash(content, "ds"),
        meta=meta,
        columns=columns,
        rows=rows,
        resource_shape=shape,
    )


def serialize_bundle(bundle: DatasetBundle) -> tuple[str, dict]:
    """Re-serialize a bundle to (csv text, schema doc); ingest round-trips it."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(bundle.column_names)
    for row in bundle.rows:
        writer.writerow([format_value(row[name]) for name in bundle.column_names])
    schema_doc: dict[str, Any] = {
        "name": bundle.meta.name,
        "description": bundle.meta.description,
        "source": bundle.meta.source,
        "resourceShape": bundle.resource_shape,
        "columns": [c.to_doc() for c in bundle.columns],
    }
    if bundle.meta.season is not None:
        schema_doc["season"] = bundle.meta.season
    return buf.getvalue(), schema_doc


# --- summaries -------------------------------------------------------------


@dataclass
class DatasetSummary:
    dataset_id: str
    row_count: int
    bin_count: int
    columns: dict = field(default_factory=dict)  # name -> per-kind summary doc

    def to_doc(self) -> dict:
        return {
            "datasetId": self.dataset_id,
            "rowCount": self.row_count,
            "binCount": self.bin_count,
            "columns": self.columns,
        }


def numeric_bin_edges(values: list[float], bin_count: int) -> list[float]:
    """Equal-width edges over [min, max]; a constant column widens by +/-0.5."""
    if values:
        lo, hi = min(values), max(values)
    else:
        lo = hi = 0.0
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return [float(e) for e in np.linspace(lo, hi, bin_count + 1)]


def bin_index(value: float, edges: list[float]) -> int:
    """Right-open bins, except the last bin is right-closed."""
    idx = int(np.searchsorted(np.asarray(edges), value, side="right")) - 1
    return min(max(idx, 0), len(edges) - 2)


def _summarize_column(bundle: DatasetBundle, col: ColumnSchema, bin_count: int) -> dict:
    values = bundle.values(col.name)
    present = [v for v in values if v is not None]
    missing = len(values) - len(present)
    doc: dict[str, Any] = {"kind": col.kind, "missingCount": missing}
    if col.kind == "numeric":
        edges = numeric_bin_edges(present, bin_count)
        counts = [0] * bin_count
        for v in present:
            counts[bin_index(v, edges)] += 1
        doc.update(
            {
                "histogram": {"edges": edges, "counts": counts},
                "min": min(present) if present else None,
                "max": max(present) if present else None,
            }
        )
    elif col.kind == "categorical":
        freq = Counter(present)
        doc["frequencies"] = [
            {"label": label, "count": freq[label]} for label in sorted(freq)
        ]
    elif col.kind == "datetime":
        doc["span"] = {
            "min": min(present).isoformat() if present else None,
            "max": max(present).isoformat() if present else None,
        }
        doc["count"] = len(present)
    else:  # key / reference: identifier columns only get cardinality
        doc["distinctCount"] = len(set(present))
        doc["count"] = len(present)
    return doc


def summarize(bundle: DatasetBundle, bin_count: int = DEFAULT_BIN_COUNT) -> DatasetSummary:
    """Per-column summary cards: histograms, frequency tables, spans."""
    if bin_count < 1:
        raise BadSelectorError(f"binCount must be >= 1, got {bin_count}")
    return DatasetSummary(
        dataset_id=bundle.id,
        row_count=bundle.row_count,
        bin_count=bin_count,
        columns={
            col.name: _summarize_column(bundle, col, bin_count)
            for col in bundle.columns
        },
    )


def rows_matching(bundle: DatasetBundle, selector: dict) -> set[int]:
    """RowIds selected by a histogram bin or a categorical label.

    Selectors: ``{"column": c, "label": l}`` for categorical columns, or
    ``{"column": c, "binIndex": i, "binCount": n}`` (binCount defaults to 10)
    for numeric columns.  Missing values match nothing.
    """
    name = selector.get("column")
    if name is None or not bundle.has_column(name):
        raise UnknownColumnError(f"unknown column: {name}")
    col = bundle.column(name)
    values = bundle.values(name)

    if "label" in selector:
        if col.kind != "categorical":
            raise BadSelectorError(
                f"label selector needs a categorical column; {name!r} is {col.kind}"
            )
        label = selector["label"]
        return {i for i, v in enumerate(values) if v is not None and v == label}

    if "binIndex" in selector:
        if col.kind != "numeric":
            raise BadSelectorError(
                f"binIndex selector needs a numeric column; {name!r} is {col.kind}"
            )
        bin_count = int(selector.get("binCount", DEFAULT_BIN_COUNT))
        idx = int(selector["binIndex"])
        if not 0 <= idx < bin_count:
            raise BadSelectorError(
                f"binIndex {idx} out of range for binCount {bin_count}"
            )
        present = [v for v in values if v is not None]
        edges = numeric_bin_edges(present, bin_count)
        return {
            i
            for i, v in enumerate(values)
            if v is not None and bin_index(v, edges) == idx
        }

    raise BadSelectorError("selector needs either 'label' or 'binIndex'")
