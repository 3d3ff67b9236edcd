import pytest

from emabench import ingest
from emabench.sampledata import (
    auto_mpg,
    monthly_series,
    popular_kids,
    ratings_triples,
    tiny_mixed,
)


@pytest.fixture(scope="session")
def kids_bundle():
    csv_text, schema = popular_kids()
    return ingest(csv_text, schema)


@pytest.fixture(scope="session")
def mpg_bundle():
    csv_text, schema = auto_mpg()
    return ingest(csv_text, schema)


@pytest.fixture(scope="session")
def tiny_bundle():
    csv_text, schema = tiny_mixed()
    return ingest(csv_text, schema)


@pytest.fixture(scope="session")
def series_bundle():
    csv_text, schema = monthly_series()
    return ingest(csv_text, schema)


@pytest.fixture(scope="session")
def ratings_bundle():
    csv_text, schema = ratings_triples()
    return ingest(csv_text, schema)
