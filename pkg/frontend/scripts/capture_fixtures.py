"""Record real gateway payloads into frontend test fixtures.

Run from the repository root (the emabench package must be installed):

    python3 frontend/scripts/capture_fixtures.py

The frontend tests replay these documents through a mocked fetch, so every
number the UI renders is checked against what the server actually said.
"""
import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from emabench.gateway.api import create_app
from emabench.sampledata import auto_mpg, monthly_series, popular_kids
from emabench.workbench import Workbench

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def wait_done(client, search_id):
    while True:
        status = client.get(f"/searches/{search_id}/status").json()
        if status["state"] in ("done", "failed"):
            assert status["state"] == "done", status
            return status
        time.sleep(0.05)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    root = Path(tempfile.mkdtemp(prefix="emabench-fixtures-"))
    bench = Workbench(root / "data", root / "exports")
    client = TestClient(create_app(bench))
    fixtures = {}

    # --- popular kids: data exploration + classification ------------------
    csv_text, schema = popular_kids()
    kids_id = client.post("/datasets", json={"csv": csv_text, "schema": schema}).json()[
        "datasetId"
    ]
    fixtures["kidsDataset"] = client.get(f"/datasets/{kids_id}").json()
    fixtures["kidsSummary"] = client.get(f"/datasets/{kids_id}/summary").json()
    fixtures["kidsRowsPage"] = client.get(
        f"/datasets/{kids_id}/rows", params={"offset": 0, "limit": 25}
    ).json()
    fixtures["kidsSportsRows"] = client.post(
        f"/datasets/{kids_id}/rows/matching",
        json={"selector": {"column": "Goal", "label": "Sports"}},
    ).json()
    fixtures["kidsAgeBinRows"] = client.post(
        f"/datasets/{kids_id}/rows/matching",
        json={"selector": {"column": "Age", "binIndex": 9, "binCount": 10}},
    ).json()
    kids_specs = client.get(f"/datasets/{kids_id}/problems").json()
    fixtures["kidsProblems"] = kids_specs
    goal = next(
        s
        for s in kids_specs["specs"]
        if s["target"] == "Goal" and s["metric"] == "accuracy"
    )
    refined = client.post(
        f"/specs/{goal['id']}/refine",
        json={"removeFeatures": ["School", "District"]},
    ).json()
    fixtures["goalSpecRefined"] = refined

    search_id = client.post(
        "/searches",
        json={"specId": refined["id"], "budget": 13, "topK": 3, "seed": 11},
    ).json()["searchId"]
    fixtures["kidsSearchStatus"] = wait_done(client, search_id)
    kids_cands = client.get(f"/searches/{search_id}/candidates").json()
    fixtures["kidsCandidates"] = kids_cands
    fixtures["kidsTopReport"] = client.get(
        f"/candidates/{kids_cands['candidates'][0]['id']}/report"
    ).json()

    # --- auto mpg: regression comparison ------------------------------------
    csv_text, schema = auto_mpg()
    mpg_id = client.post("/datasets", json={"csv": csv_text, "schema": schema}).json()[
        "datasetId"
    ]
    mpg_specs = client.get(f"/datasets/{mpg_id}/problems").json()["specs"]
    mpg_spec = next(
        s for s in mpg_specs if s["target"] == "mpg" and s["metric"] == "mse"
    )
    search_id = client.post(
        "/searches", json={"specId": mpg_spec["id"], "budget": 6, "topK": 6, "seed": 7}
    ).json()["searchId"]
    wait_done(client, search_id)
    mpg_cands = client.get(f"/searches/{search_id}/candidates").json()
    fixtures["mpgCandidates"] = mpg_cands
    fixtures["mpgReportA"] = client.get(
        f"/candidates/{mpg_cands['candidates'][0]['id']}/report"
    ).json()
    fixtures["mpgReportB"] = client.get(
        f"/candidates/{mpg_cands['candidates'][1]['id']}/report"
    ).json()

    # --- monthly series: forecast overlay ------------------------------------
    csv_text, schema = monthly_series()
    ts_id = client.post("/datasets", json={"csv": csv_text, "schema": schema}).json()[
        "datasetId"
    ]
    ts_specs = client.get(f"/datasets/{ts_id}/problems").json()["specs"]
    fc_spec = next(
        s for s in ts_specs if s["taskType"] == "forecasting" and s["metric"] == "rmse"
    )
    search_id = client.post(
        "/searches", json={"specId": fc_spec["id"], "budget": 6, "topK": 3, "seed": 2}
    ).json()["searchId"]
    wait_done(client, search_id)
    fc_cands = client.get(f"/searches/{search_id}/candidates").json()
    fixtures["forecastCandidates"] = fc_cands
    fixtures["forecastReport"] = client.get(
        f"/candidates/{fc_cands['candidates'][0]['id']}/report"
    ).json()
    fixtures["seriesRows"] = client.get(
        f"/datasets/{ts_id}/rows", params={"offset": 0, "limit": 60}
    ).json()

    # --- session states at interesting steps ---------------------------------
    sid = client.post("/sessions", json={"datasetId": kids_id}).json()["id"]
    fixtures["sessionStep1"] = client.get(f"/sessions/{sid}").json()
    client.post(f"/sessions/{sid}/advance", json={"event": "exploreProblems"})
    fixtures["sessionStep2"] = client.get(f"/sessions/{sid}").json()
    client.post(
        f"/sessions/{sid}/advance",
        json={"event": "specifyProblem", "specId": refined["id"]},
    )
    client.post(
        f"/sessions/{sid}/advance",
        json={"event": "startSearch", "searchId": search_id},
    )
    client.post(f"/sessions/{sid}/advance", json={"event": "exploreModels"})
    fixtures["sessionStep5"] = client.get(f"/sessions/{sid}").json()
    illegal = client.post(f"/sessions/{sid}/advance", json={"event": "exportModels"})
    fixtures["illegalTransition"] = {
        "status": illegal.status_code,
        "body": illegal.json(),
    }

    for name, doc in fixtures.items():
        (OUT / f"{name}.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(f"wrote {len(fixtures)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
