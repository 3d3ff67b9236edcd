import json
import re
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from emabench.errors import CODES
from emabench.gateway.api import create_app
from emabench.gateway.cli import main as cli_main
from emabench.sampledata import auto_mpg, popular_kids, tiny_mixed
from emabench.workbench import Workbench

DOC_PATH = Path(__file__).resolve().parents[1] / "docs" / "api_reference.md"


@pytest.fixture()
def bench(tmp_path):
    return Workbench(tmp_path / "data", tmp_path / "exports")


@pytest.fixture()
def client(bench):
    return TestClient(create_app(bench))


def _upload(client, generator):
    csv_text, schema = generator()
    resp = client.post("/datasets", json={"csv": csv_text, "schema": schema})
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestDatasetEndpoints:
    def test_upload_popular_kids(self, client):
        doc = _upload(client, popular_kids)
        assert doc["rowCount"] == 478
        assert doc["datasetId"].startswith("ds-")

    def test_summary_and_matching_consistency(self, client):
        dataset_id = _upload(client, popular_kids)["datasetId"]
        summary = client.get(f"/datasets/{dataset_id}/summary").json()
        goal = summary["columns"]["Goal"]
        sports = next(
            f["count"] for f in goal["frequencies"] if f["label"] == "Sports"
        )
        hits = client.post(
            f"/datasets/{dataset_id}/rows/matching",
            json={"selector": {"column": "Goal", "label": "Sports"}},
        ).json()["rowIds"]
        assert len(hits) == sports
        assert hits == sorted(hits)

    def test_rows_paging(self, client):
        dataset_id = _upload(client, tiny_mixed)["datasetId"]
        rows = client.get(
            f"/datasets/{dataset_id}/rows", params={"offset": 5, "limit": 3}
        ).json()["rows"]
        assert [r["rowId"] for r in rows] == [5, 6, 7]

    def test_unknown_dataset_404(self, client):
        resp = client.get("/datasets/ds-missing")
        assert resp.status_code == 404
        assert resp.json()["error"]["code"] == "NOT_FOUND"

    def test_malformed_body(self, client):
        resp = client.post("/datasets", content=b"{not json")
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "BAD_REQUEST"

    def test_schema_mismatch_maps_to_code(self, client):
        resp = client.post(
            "/datasets",
            json={
                "csv": "a,b\n1,2\n",
                "schema": {
                    "resourceShape": "tabular",
                    "columns": [{"name": "a", "kind": "numeric"}],
                },
            },
        )
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "SCHEMA_MISMATCH"


class TestSpecEndpoints:
    def test_enumerate_refine_create(self, client):
        dataset_id = _upload(client, popular_kids)["datasetId"]
        specs = client.get(f"/datasets/{dataset_id}/problems").json()["specs"]
        goal = next(
            s
            for s in specs
            if s["target"] == "Goal" and s["metric"] == "accuracy"
        )
        refined = client.post(
            f"/specs/{goal['id']}/refine",
            json={"removeFeatures": ["School", "District"]},
        ).json()
        assert "School" not in refined["features"]
        assert refined["provenance"] == f"refinedFrom:{goal['id']}"

        fetched = client.get(f"/specs/{refined['id']}").json()
        assert fetched == refined

        invalid = client.post(
            "/specs",
            json={
                "datasetId": dataset_id,
                "taskType": "regression",
                "target": "Goal",
                "metric": "mse",
                "features": ["Age"],
            },
        )
        assert invalid.status_code == 400
        assert invalid.json()["error"]["code"] == "SPEC_INVALID"
        assert "targetKindMismatch" in invalid.json()["error"]["details"]["violations"]


def _run_search(client, spec_id, budget=6, top_k=6, seed=7):
    resp = client.post(
        "/searches",
        json={"specId": spec_id, "budget": budget, "topK": top_k, "seed": seed},
    )
    assert resp.status_code == 200, resp.text
    search_id = resp.json()["searchId"]
    deadline = time.time() + 60
    while time.time() < deadline:
        status = client.get(f"/searches/{search_id}/status").json()
        if status["state"] in ("done", "failed"):
            break
        time.sleep(0.02)
    assert status["state"] == "done", status
    return search_id, status


class TestSearchEndpoints:
    def test_submit_poll_candidates_report(self, client):
        dataset_id = _upload(client, auto_mpg)["datasetId"]
        specs = client.get(f"/datasets/{dataset_id}/problems").json()["specs"]
        spec = next(
            s for s in specs if s["target"] == "mpg" and s["metric"] == "mse"
        )
        search_id, status = _run_search(client, spec["id"])
        assert status["evaluated"] == status["total"] <= 6

        cands = client.get(f"/searches/{search_id}/candidates").json()["candidates"]
        assert len(cands) == 6
        assert [c["rank"] for c in cands] == list(range(1, 7))

        report = client.get(f"/candidates/{cands[0]['id']}/report").json()
        assert report["candidateId"] == cands[0]["id"]
        assert report["scores"] == cands[0]["scores"]
        assert all("residual" in e for e in report["perInstance"])

    def test_unknown_search_and_candidate(self, client):
        assert client.get("/searches/srch-none/status").status_code == 404
        assert client.get("/candidates/cand-none/report").status_code == 404


class TestSessionEndpoints:
    def test_full_workflow_over_http(self, client, bench):
        dataset_id = _upload(client, auto_mpg)["datasetId"]
        specs = client.get(f"/datasets/{dataset_id}/problems").json()["specs"]
        spec = next(
            s for s in specs if s["target"] == "mpg" and s["metric"] == "mse"
        )
        session = client.post("/sessions", json={"datasetId": dataset_id}).json()
        sid = session["id"]
        assert session["stepName"] == "dataExploration"
        assert session["legalEvents"] == ["exploreProblems"]

        for event, extra in (
            ("exploreProblems", {}),
            ("specifyProblem", {"specId": spec["id"]}),
        ):
            session = client.post(
                f"/sessions/{sid}/advance", json={"event": event, **extra}
            ).json()
        assert session["activeSpecId"] == spec["id"]

        search_id, _ = _run_search(client, spec["id"])
        session = client.post(
            f"/sessions/{sid}/advance",
            json={"event": "startSearch", "searchId": search_id},
        ).json()
        assert search_id in session["searchIds"]
        session = client.post(
            f"/sessions/{sid}/advance", json={"event": "exploreModels"}
        ).json()
        session = client.post(
            f"/sessions/{sid}/advance", json={"event": "selectModels"}
        ).json()

        cands = client.get(f"/searches/{search_id}/candidates").json()["candidates"]
        picked = [cands[2]["id"], cands[0]["id"]]
        session = client.post(
            f"/sessions/{sid}/selections",
            json={"candidateIds": picked, "userRanks": [1, 2]},
        ).json()
        assert len(session["selections"]) == 2

        session = client.post(
            f"/sessions/{sid}/advance", json={"event": "exportModels"}
        ).json()
        exported = client.post(f"/sessions/{sid}/export").json()["artifacts"]
        assert len(exported) == 2
        for artifact in exported:
            assert Path(artifact["modelPath"]).exists()
            assert Path(artifact["cardPath"]).exists()

        # return-to-step-3 loop stays available after export
        session = client.post(
            f"/sessions/{sid}/advance", json={"event": "retryProblem"}
        ).json()
        assert session["stepName"] == "problemSpecification"

    def test_illegal_transition_code(self, client):
        dataset_id = _upload(client, tiny_mixed)["datasetId"]
        sid = client.post("/sessions", json={"datasetId": dataset_id}).json()["id"]
        resp = client.post(f"/sessions/{sid}/advance", json={"event": "selectModels"})
        assert resp.status_code == 409
        assert resp.json()["error"]["code"] == "WORKFLOW_ILLEGAL_TRANSITION"

    def test_selection_outside_step_six(self, client):
        dataset_id = _upload(client, tiny_mixed)["datasetId"]
        sid = client.post("/sessions", json={"datasetId": dataset_id}).json()["id"]
        resp = client.post(
            f"/sessions/{sid}/selections",
            json={"candidateIds": [], "userRanks": []},
        )
        assert resp.status_code in (400, 404, 409)


class TestRestartInvariance:
    def test_reads_identical_after_restart(self, tmp_path):
        bench = Workbench(tmp_path / "data", tmp_path / "exports")
        client = TestClient(create_app(bench))
        dataset_id = _upload(client, tiny_mixed)["datasetId"]
        specs = client.get(f"/datasets/{dataset_id}/problems").json()["specs"]
        spec = next(s for s in specs if s["taskType"] == "regression")
        search_id, _ = _run_search(client, spec["id"], budget=4, top_k=4)
        before = {
            "summary": client.get(f"/datasets/{dataset_id}/summary").json(),
            "spec": client.get(f"/specs/{spec['id']}").json(),
            "candidates": client.get(f"/searches/{search_id}/candidates").json(),
        }
        report_id = before["candidates"]["candidates"][0]["id"]
        before["report"] = client.get(f"/candidates/{report_id}/report").json()

        fresh = TestClient(
            create_app(Workbench(tmp_path / "data", tmp_path / "exports"))
        )
        after = {
            "summary": fresh.get(f"/datasets/{dataset_id}/summary").json(),
            "spec": fresh.get(f"/specs/{spec['id']}").json(),
            "candidates": fresh.get(f"/searches/{search_id}/candidates").json(),
            "report": fresh.get(f"/candidates/{report_id}/report").json(),
        }
        before_doc = json.dumps(before, sort_keys=True)
        after_doc = json.dumps(after, sort_keys=True)
        assert before_doc == after_doc


class TestApiReferenceContract:
    def _documented_endpoints(self):
        text = DOC_PATH.read_text(encoding="utf-8")
        return {
            (m.group(1), m.group(2))
            for m in re.finditer(r"`(GET|POST) (/[^`]*)`", text)
        }

    def test_every_route_documented_and_vice_versa(self, bench):
        app = create_app(bench)
        served = set()
        for route in app.routes:
            if not hasattr(route, "methods"):
                continue
            for method in route.methods - {"HEAD", "OPTIONS"}:
                path = re.sub(r"\{[^}]*\}", "{}", route.path)
                served.add((method, path))
        documented = {
            (m, re.sub(r"\{[^}]*\}", "{}", p)) for m, p in self._documented_endpoints()
        }
        assert documented == served

    def test_error_codes_documented(self):
        text = DOC_PATH.read_text(encoding="utf-8")
        for code in CODES:
            assert f"`{code}`" in text, f"error code {code} missing from reference"


class TestCli:
    def _write_fixture(self, tmp_path, generator, stem):
        csv_text, schema = generator()
        csv_path = tmp_path / f"{stem}.csv"
        schema_path = tmp_path / f"{stem}.schema.json"
        csv_path.write_text(csv_text, encoding="utf-8")
        schema_path.write_text(json.dumps(schema), encoding="utf-8")
        return csv_path, schema_path

    def _base(self, tmp_path):
        return [
            "--data-dir", str(tmp_path / "data"),
            "--export-dir", str(tmp_path / "exports"),
            "--json",
        ]

    def _run(self, capsys, argv):
        code = cli_main(argv)
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    def test_problems_lists_twelve_specs(self, tmp_path, capsys):
        csv_path, schema_path = self._write_fixture(tmp_path, tiny_mixed, "tiny")
        base = self._base(tmp_path)
        code, out, _ = self._run(capsys, base + ["ingest", str(csv_path), str(schema_path)])
        assert code == 0
        dataset_id = json.loads(out)["datasetId"]
        code, out, _ = self._run(capsys, base + ["problems", "--dataset", dataset_id])
        assert code == 0
        assert len(json.loads(out)["specs"]) == 12

    def test_search_select_export_flow(self, tmp_path, capsys):
        csv_path, schema_path = self._write_fixture(tmp_path, auto_mpg, "mpg")
        base = self._base(tmp_path)
        code, out, _ = self._run(capsys, base + ["ingest", str(csv_path), str(schema_path)])
        dataset_id = json.loads(out)["datasetId"]

        code, out, _ = self._run(capsys, base + ["problems", "--dataset", dataset_id])
        spec = next(
            s
            for s in json.loads(out)["specs"]
            if s["target"] == "mpg" and s["metric"] == "mse"
        )
        code, out, _ = self._run(
            capsys,
            base + ["search", "--spec", spec["id"], "--budget", "6", "--top-k", "6"],
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["candidates"]) == 6
        search_id = doc["searchId"]
        best = doc["candidates"][0]["id"]

        code, out, _ = self._run(capsys, base + ["report", "--candidate", best])
        assert code == 0
        assert json.loads(out)["candidateId"] == best

        code, out, _ = self._run(
            capsys,
            base
            + ["select", "--search", search_id, "--candidates", best, "--ranks", "1"],
        )
        assert code == 0

        code, out, _ = self._run(capsys, base + ["export", "--dataset", dataset_id])
        assert code == 0
        artifacts = json.loads(out)["artifacts"]
        assert len(artifacts) == 1
        assert Path(artifacts[0]["modelPath"]).exists()

    def test_export_without_selection_fails(self, tmp_path, capsys):
        csv_path, schema_path = self._write_fixture(tmp_path, tiny_mixed, "tiny")
        base = self._base(tmp_path)
        code, out, _ = self._run(capsys, base + ["ingest", str(csv_path), str(schema_path)])
        dataset_id = json.loads(out)["datasetId"]
        code, out, err = self._run(capsys, base + ["export", "--dataset", dataset_id])
        assert code != 0
        assert "error" in err
        assert out == ""

    def test_summarize_writes_document(self, tmp_path, capsys):
        csv_path, schema_path = self._write_fixture(tmp_path, tiny_mixed, "tiny")
        base = self._base(tmp_path)
        code, out, _ = self._run(capsys, base + ["ingest", str(csv_path), str(schema_path)])
        dataset_id = json.loads(out)["datasetId"]
        out_path = tmp_path / "summary.json"
        code, out, _ = self._run(
            capsys,
            base + ["summarize", "--dataset", dataset_id, "--out", str(out_path)],
        )
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["rowCount"] == 24
        assert json.loads(out) == doc

    def test_sample_subcommand(self, tmp_path, capsys):
        code, out, _ = self._run(
            capsys,
            ["--json", "sample", "tiny-mixed", "--out", str(tmp_path / "fixtures")],
        )
        assert code == 0
        paths = json.loads(out)
        assert Path(paths["csv"]).exists()
        assert Path(paths["schema"]).exists()

    def test_unknown_spec_errors(self, tmp_path, capsys):
        base = self._base(tmp_path)
        code, out, err = self._run(capsys, base + ["search", "--spec", "spec-missing"])
        assert code == 1
        assert json.loads(err)["error"]["code"] == "NOT_FOUND"
