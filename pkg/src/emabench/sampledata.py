"""Built-in synthetic datasets shaped like the classic workbench examples.

Each generator returns ``(csv_text, schema_doc)`` ready for ``ingest``.
Everything is seeded, so the same call always produces the same bytes.
"""
from __future__ import annotations

import io
from csv import writer as csv_writer

import numpy as np


def _render(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv_writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def popular_kids(rows: int = 478) -> tuple[str, dict]:
    """Survey-style dataset: 478 students, categorical Goal target.

    Goal in {Sports, Popular, Grades} depends noisily on gender, grade and
    the importance scores, so classifiers beat the majority baseline without
    reaching perfection.  School and District are the two school-identifier
    columns a careful analyst removes before modeling.
    """
    rng = np.random.default_rng(478)
    goals = ("Grades", "Popular", "Sports")
    genders = ("boy", "girl")
    grades = ("4", "5", "6")
    schools = ("Brentwood Elementary", "Brentwood Middle", "Ridgeway", "Sand Hill", "Westdale")
    districts = ("Rural", "Suburban", "Urban")

    header = [
        "Student", "Gender", "Grade", "Age", "School", "District",
        "GradesScore", "SportsScore", "LooksScore", "MoneyScore", "Goal",
    ]
    out = []
    for i in range(rows):
        gender = genders[rng.integers(0, 2)]
        grade = grades[rng.integers(0, 3)]
        age = int(grade) + 5 + int(rng.integers(0, 2))
        school = schools[rng.integers(0, 5)]
        district = districts[rng.integers(0, 3)]
        grades_score = float(rng.integers(1, 5))
        sports_score = float(rng.integers(1, 5))
        looks_score = float(rng.integers(1, 5))
        money_score = float(rng.integers(1, 5))

        logits = np.array(
            [
                0.9 * grades_score - 0.3 * sports_score,
                0.8 * looks_score + 0.4 * money_score - 1.2,
                1.0 * sports_score + (0.8 if gender == "boy" else -0.2),
            ]
        )
        logits += rng.normal(0.0, 1.0, size=3)
        goal = goals[int(np.argmax(logits))]
        out.append(
            [
                f"s{i:04d}", gender, grade, str(age), school, district,
                repr(grades_score), repr(sports_score), repr(looks_score),
                repr(money_score), goal,
            ]
        )

    schema = {
        "name": "Popular Kids",
        "description": "Survey of students on what drives popularity",
        "source": "synthetic fixture",
        "resourceShape": "tabular",
        "columns": [
            {"name": "Student", "kind": "key"},
            {"name": "Gender", "kind": "categorical"},
            {"name": "Grade", "kind": "categorical"},
            {"name": "Age", "kind": "numeric", "unit": "years"},
            {"name": "School", "kind": "categorical"},
            {"name": "District", "kind": "categorical"},
            {"name": "GradesScore", "kind": "numeric"},
            {"name": "SportsScore", "kind": "numeric"},
            {"name": "LooksScore", "kind": "numeric"},
            {"name": "MoneyScore", "kind": "numeric"},
            {"name": "Goal", "kind": "categorical"},
        ],
    }
    return _render(header, out), schema


def auto_mpg(rows: int = 398) -> tuple[str, dict]:
    """Car fuel-efficiency table: numeric mpg target, 398 rows, a few
    missing horsepower cells.  All feature columns are quantitative, so
    the whole regression grid (including plain least squares) is fittable.
    """
    rng = np.random.default_rng(398)
    header = [
        "mpg", "cylinders", "displacement", "horsepower", "weight",
        "acceleration", "modelYear",
    ]
    out = []
    for i in range(rows):
        size = int(rng.integers(0, 3))  # compact / midsize / large
        cylinders = float((4, 6, 8)[size])
        displacement = float(np.round(rng.normal(100 + 85 * size, 20), 1))
        horsepower = float(np.round(rng.normal(70 + 45 * size, 12), 1))
        weight = float(np.round(rng.normal(2200 + 700 * size, 250), 0))
        acceleration = float(np.round(rng.normal(16 - 1.5 * size, 2), 1))
        model_year = float(rng.integers(70, 83))
        mpg = (
            45.0
            - 0.006 * weight
            - 0.05 * horsepower
            + 0.4 * (model_year - 70)
            + rng.normal(0.0, 1.5)
        )
        mpg = float(np.round(max(mpg, 5.0), 1))
        hp_cell = "" if rng.random() < 0.015 else repr(horsepower)
        out.append(
            [
                repr(mpg), repr(cylinders), repr(displacement), hp_cell,
                repr(weight), repr(acceleration), repr(model_year),
            ]
        )
    schema = {
        "name": "Auto MPG",
        "description": "Car attributes for fuel-efficiency modeling",
        "source": "synthetic fixture",
        "resourceShape": "tabular",
        "columns": [
            {"name": "mpg", "kind": "numeric", "unit": "miles/gallon"},
            {"name": "cylinders", "kind": "numeric"},
            {"name": "displacement", "kind": "numeric", "unit": "cu in"},
            {"name": "horsepower", "kind": "numeric"},
            {"name": "weight", "kind": "numeric", "unit": "lb"},
            {"name": "acceleration", "kind": "numeric", "unit": "s to 60mph"},
            {"name": "modelYear", "kind": "numeric"},
        ],
    }
    return _render(header, out), schema


def tiny_mixed() -> tuple[str, dict]:
    """Minimal 1-categorical + 2-numeric table used by enumeration checks."""
    rng = np.random.default_rng(12)
    header = ["color", "width", "height"]
    out = []
    for _ in range(24):
        color = ("red", "green", "blue")[int(rng.integers(0, 3))]
        width = float(np.round(rng.uniform(1, 10), 3))
        height = float(np.round(width * 1.5 + rng.normal(0, 0.5), 3))
        out.append([color, repr(width), repr(height)])
    schema = {
        "name": "Tiny Mixed",
        "description": "One categorical and two numeric columns",
        "source": "synthetic fixture",
        "resourceShape": "tabular",
        "columns": [
            {"name": "color", "kind": "categorical"},
            {"name": "width", "kind": "numeric"},
            {"name": "height", "kind": "numeric"},
        ],
    }
    return _render(header, out), schema


def monthly_series(points: int = 60, season: int = 12) -> tuple[str, dict]:
    """Seasonal time series with trend; one datetime + one numeric column."""
    rng = np.random.default_rng(60)
    header = ["month", "demand"]
    out = []
    for t in range(points):
        year, month = 2020 + t // 12, t % 12 + 1
        value = 100 + 0.8 * t + 12 * np.sin(2 * np.pi * (t % season) / season)
        value += rng.normal(0, 1.0)
        out.append([f"{year:04d}-{month:02d}-01T00:00:00", repr(float(np.round(value, 3)))])
    schema = {
        "name": "Monthly Demand",
        "description": "Synthetic seasonal demand series",
        "source": "synthetic fixture",
        "resourceShape": "timeseries",
        "season": season,
        "columns": [
            {"name": "month", "kind": "datetime"},
            {"name": "demand", "kind": "numeric"},
        ],
    }
    return _render(header, out), schema


def ratings_triples(users: int = 30, items: int = 12) -> tuple[str, dict]:
    """(user, item, rating) triples with planted user and item biases."""
    rng = np.random.default_rng(42)
    user_bias = rng.normal(0, 0.6, size=users)
    item_bias = rng.normal(0, 0.8, size=items)
    header = ["user", "item", "rating"]
    out = []
    for u in range(users):
        rated = rng.permutation(items)[: rng.integers(6, items + 1)]
        for i in sorted(int(x) for x in rated):
            r = 3.0 + user_bias[u] + item_bias[i] + rng.normal(0, 0.3)
            r = float(np.clip(np.round(r * 2) / 2, 1.0, 5.0))
            out.append([f"u{u:03d}", f"m{i:03d}", repr(r)])
    schema = {
        "name": "Movie Ratings",
        "description": "User-item rating triples",
        "source": "synthetic fixture",
        "resourceShape": "ratingsTriple",
        "columns": [
            {"name": "user", "kind": "categorical"},
            {"name": "item", "kind": "categorical"},
            {"name": "rating", "kind": "numeric", "unit": "stars"},
        ],
    }
    return _render(header, out), schema


GENERATORS = {
    "popular-kids": popular_kids,
    "auto-mpg": auto_mpg,
    "tiny-mixed": tiny_mixed,
    "monthly-series": monthly_series,
    "ratings": ratings_triples,
}
