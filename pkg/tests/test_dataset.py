from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emabench.dataset import (
    bin_index,
    ingest,
    numeric_bin_edges,
    rows_matching,
    serialize_bundle,
    summarize,
)
from emabench.errors import (
    BadSelectorError,
    DuplicateColumnError,
    EmptyDatasetError,
    SchemaMismatchError,
    UnknownColumnError,
    ValueParseError,
)
from emabench.sampledata import popular_kids


def _schema(*cols, shape="tabular", **extra):
    return {
        "name": "t",
        "resourceShape": shape,
        "columns": [{"name": n, "kind": k} for n, k in cols],
        **extra,
    }


class TestIngest:
    def test_popular_kids_shape(self, kids_bundle):
        assert kids_bundle.row_count == 478
        assert kids_bundle.column("Goal").kind == "categorical"
        assert kids_bundle.resource_shape == "tabular"

    def test_header_only_is_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            ingest("a,b\n", _schema(("a", "numeric"), ("b", "categorical")))

    def test_no_header_is_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            ingest("", _schema(("a", "numeric")))

    def test_unparseable_numeric_names_row_and_column(self):
        lines = ["x"] + [("abc" if i == 7 else str(float(i))) for i in range(10)]
        with pytest.raises(ValueParseError) as err:
            ingest("\n".join(lines) + "\n", _schema(("x", "numeric")))
        assert err.value.row_id == 7
        assert err.value.column == "x"

    def test_nan_token_rejected_for_numeric(self):
        with pytest.raises(ValueParseError):
            ingest("x\nnan\n", _schema(("x", "numeric")))

    def test_header_schema_mismatch(self):
        with pytest.raises(SchemaMismatchError):
            ingest("a,b\n1,2\n", _schema(("a", "numeric")))
        with pytest.raises(SchemaMismatchError):
            ingest("a\n1\n", _schema(("a", "numeric"), ("b", "numeric")))

    def test_duplicate_header_columns(self):
        with pytest.raises(DuplicateColumnError):
            ingest("a,a\n1,2\n", _schema(("a", "numeric")))

    def test_missing_cells_are_missing_not_zero(self):
        bundle = ingest(
            "x,y\n1.0,u\n,v\n3.0,\n",
            _schema(("x", "numeric"), ("y", "categorical")),
        )
        assert bundle.rows[1]["x"] is None
        assert bundle.rows[2]["y"] is None
        assert bundle.rows[0]["x"] == 1.0

    def test_bad_datetime_reported(self):
        with pytest.raises(ValueParseError):
            ingest("t\nnot-a-date\n", _schema(("t", "datetime")))

    def test_timeseries_requires_sorted_datetime(self):
        schema = _schema(("t", "datetime"), ("v", "numeric"), shape="timeseries")
        with pytest.raises(SchemaMismatchError):
            ingest("t,v\n2020-02-01T00:00:00,1.0\n2020-01-01T00:00:00,2.0\n", schema)
        ok = ingest("t,v\n2020-01-01T00:00:00,1.0\n2020-02-01T00:00:00,2.0\n", schema)
        assert ok.resource_shape == "timeseries"

    def test_ratings_triple_shape_checked(self):
        schema = _schema(("u", "categorical"), ("v", "numeric"), shape="ratingsTriple")
        with pytest.raises(SchemaMismatchError):
            ingest("u,v\na,1.0\n", schema)

    def test_at_most_one_key_column(self):
        with pytest.raises(SchemaMismatchError):
            ingest("a,b\nx,y\n", _schema(("a", "key"), ("b", "key")))

    def test_round_trip_yields_identical_bundle(self, kids_bundle, series_bundle):
        for bundle in (kids_bundle, series_bundle):
            csv_text, schema = serialize_bundle(bundle)
            again = ingest(csv_text, schema)
            assert again.id == bundle.id
            assert again.rows == bundle.rows
            assert again.columns == bundle.columns


class TestSummarize:
    def test_uniform_ten_values_ten_bins(self):
        csv_text = "x\n" + "\n".join(str(float(i)) for i in range(10)) + "\n"
        bundle = ingest(csv_text, _schema(("x", "numeric")))
        summary = summarize(bundle, bin_count=10)
        assert summary.columns["x"]["histogram"]["counts"] == [1] * 10

    def test_goal_frequencies_match_scan_oracle(self, kids_bundle):
        oracle = Counter(v for v in kids_bundle.values("Goal") if v is not None)
        summary = summarize(kids_bundle)
        table = {
            f["label"]: f["count"] for f in summary.columns["Goal"]["frequencies"]
        }
        assert table == dict(oracle)
        assert sum(table.values()) == 478

    def test_constant_column_widened_single_bin(self):
        csv_text = "x\n5.0\n5.0\n5.0\n"
        bundle = ingest(csv_text, _schema(("x", "numeric")))
        summary = summarize(bundle, bin_count=10)
        hist = summary.columns["x"]["histogram"]
        assert hist["edges"][0] == 4.5
        assert hist["edges"][-1] == 5.5
        assert sum(1 for c in hist["counts"] if c) == 1
        assert sum(hist["counts"]) == 3

    def test_counts_plus_missing_equal_row_count(self, kids_bundle, mpg_bundle):
        for bundle in (kids_bundle, mpg_bundle):
            summary = summarize(bundle)
            for name, col in summary.columns.items():
                if "histogram" in col:
                    counted = sum(col["histogram"]["counts"])
                elif "frequencies" in col:
                    counted = sum(f["count"] for f in col["frequencies"])
                else:
                    counted = col["count"]
                assert counted + col["missingCount"] == bundle.row_count, name


class TestRowsMatching:
    def test_label_selector_matches_scan_oracle(self, kids_bundle):
        oracle = {
            i
            for i, v in enumerate(kids_bundle.values("Goal"))
            if v == "Sports"
        }
        got = rows_matching(kids_bundle, {"column": "Goal", "label": "Sports"})
        assert got == oracle
        assert got  # fixture really contains Sports rows

    def test_empty_bin_empty_set(self):
        bundle = ingest("x\n0.0\n9.0\n", _schema(("x", "numeric")))
        hits = rows_matching(bundle, {"column": "x", "binIndex": 5, "binCount": 10})
        assert hits == set()

    def test_last_bin_right_closed_holds_maximum(self, mpg_bundle):
        values = [v for v in mpg_bundle.values("mpg") if v is not None]
        top_row = values.index(max(values))
        hits = rows_matching(mpg_bundle, {"column": "mpg", "binIndex": 9, "binCount": 10})
        assert top_row in hits

    def test_missing_values_match_nothing(self):
        bundle = ingest("x\n1.0\n\n2.0\n", _schema(("x", "numeric")))
        all_hit = set()
        for b in range(10):
            all_hit |= rows_matching(bundle, {"column": "x", "binIndex": b})
        assert 1 not in all_hit

    def test_bins_partition_non_missing_rows(self, mpg_bundle):
        for column in ("mpg", "horsepower"):
            seen: dict[int, int] = {}
            for b in range(10):
                hits = rows_matching(
                    mpg_bundle, {"column": column, "binIndex": b, "binCount": 10}
                )
                for row in hits:
                    assert row not in seen, "bins overlap"
                    seen[row] = b
            non_missing = {
                i for i, v in enumerate(mpg_bundle.values(column)) if v is not None
            }
            assert set(seen) == non_missing

    def test_unknown_column_and_bad_bin(self, kids_bundle):
        with pytest.raises(UnknownColumnError):
            rows_matching(kids_bundle, {"column": "nope", "label": "x"})
        with pytest.raises(BadSelectorError):
            rows_matching(kids_bundle, {"column": "Age", "binIndex": 10, "binCount": 10})
        with pytest.raises(BadSelectorError):
            rows_matching(kids_bundle, {"column": "Goal", "binIndex": 0})


@settings(deadline=None, max_examples=60)
@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=1,
        max_size=80,
    ),
    st.integers(min_value=1, max_value=12),
)
def test_bin_indices_partition_everything(values, bins):
    edges = numeric_bin_edges(values, bins)
    for v in values:
        idx = bin_index(v, edges)
        assert 0 <= idx < bins
        if idx < bins - 1:
            assert edges[idx] <= v < edges[idx + 1] or edges[idx] == edges[idx + 1]
        else:
            assert edges[idx] <= v <= edges[idx + 1]


def test_sample_generators_are_deterministic():
    a = popular_kids()
    b = popular_kids()
    assert a == b
