"""HTTP endpoints over JSON bodies.

The endpoint catalog and every field name are part of the wire contract,
documented in ``docs/api_reference.md`` and checked by contract tests.
Search submission returns immediately with an id; clients poll status.
Errors are ``{"error": {"code", "message", "details"}}`` with codes from
the closed catalog in ``emabench.errors``.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import BadRequestError, NotFoundError, WorkbenchError
from ..workbench import Workbench

_STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "WORKFLOW_ILLEGAL_TRANSITION": 409,
    "ARTIFACT_VERSION": 409,
    "INTERNAL": 500,
}


def _candidate_doc(cand) -> dict:
    return cand.summary_doc()


def create_app(bench: Workbench) -> FastAPI:
    app = FastAPI(title="emabench", openapi_url=None, docs_url=None, redoc_url=None)

    @app.exception_handler(WorkbenchError)
    async def workbench_error(_req: Request, exc: WorkbenchError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 400),
            content={"error": exc.to_doc()},
        )

    async def body_of(request: Request) -> dict:
        try:
            doc = await request.json()
        except Exception:
            raise BadRequestError("request body is not valid JSON") from None
        if not isinstance(doc, dict):
            raise BadRequestError("request body must be a JSON object")
        return doc

    def require(doc: dict, *names: str) -> list:
        missing = [n for n in names if n not in doc]
        if missing:
            raise BadRequestError(
                "missing required fields: " + ", ".join(missing),
                {"missing": missing},
            )
        return [doc[n] for n in names]

    # --- datasets ---------------------------------------------------------

    @app.post("/datasets")
    async def upload_dataset(request: Request):
        doc = await body_of(request)
        csv_text, schema = require(doc, "csv", "schema")
        bundle = bench.ingest(csv_text, schema)
        return {
            "datasetId": bundle.id,
            "rowCount": bundle.row_count,
            "resourceShape": bundle.resource_shape,
        }

    @app.get("/datasets")
    async def list_datasets():
        return {"datasetIds": bench.dataset_ids()}

    @app.get("/datasets/{dataset_id}")
    async def dataset_info(dataset_id: str):
        bundle = bench.bundle(dataset_id)
        return {
            "datasetId": bundle.id,
            "rowCount": bundle.row_count,
            "resourceShape": bundle.resource_shape,
            "metadata": bundle.meta.to_doc(),
            "columns": [c.to_doc() for c in bundle.columns],
        }

    @app.get("/datasets/{dataset_id}/summary")
    async def dataset_summary(dataset_id: str, bins: int = 10):
        return bench.summary(dataset_id, bins).to_doc()

    @app.get("/datasets/{dataset_id}/rows")
    async def dataset_rows(dataset_id: str, offset: int = 0, limit: int = 50):
        return {"rows": bench.rows(dataset_id, offset, limit)}

    @app.post("/datasets/{dataset_id}/rows/matching")
    async def dataset_rows_matching(dataset_id: str, request: Request):
        doc = await body_of(request)
        (selector,) = require(doc, "selector")
        return {"rowIds": bench.matching_rows(dataset_id, selector)}

    @app.get("/datasets/{dataset_id}/problems")
    async def dataset_problems(dataset_id: str):
        return {"specs": [s.to_doc() for s in bench.problems(dataset_id)]}

    # --- problem specs ------------------------------------------------------

    @app.post("/specs")
    async def create_spec(request: Request):
        doc = await body_of(request)
        return bench.create_spec(doc).to_doc()

    @app.get("/specs/{spec_id}")
    async def get_spec(spec_id: str):
        return bench.spec(spec_id).to_doc()

    @app.post("/specs/{spec_id}/refine")
    async def refine_spec(spec_id: str, request: Request):
        doc = await body_of(request)
        refined = bench.refine_spec(
            spec_id,
            remove_features=doc.get("removeFeatures", []),
            set_metric=doc.get("setMetric"),
        )
        return refined.to_doc()

    # --- searches -------------------------------------------------------------

    @app.post("/searches")
    async def submit_search(request: Request):
        doc = await body_of(request)
        spec_id, budget, top_k = require(doc, "specId", "budget", "topK")
        search_id = bench.submit_search(
            spec_id,
            int(budget),
            int(top_k),
            seed=int(doc.get("seed", 0)),
            holdout_fraction=float(doc.get("holdoutFraction", 0.25)),
        )
        return {"searchId": search_id}

    @app.get("/searches/{search_id}/status")
    async def search_status(search_id: str):
        return bench.search_status(search_id).to_doc()

    @app.get("/searches/{search_id}/candidates")
    async def search_candidates(search_id: str):
        return {
            "candidates": [_candidate_doc(c) for c in bench.candidates(search_id)]
        }

    @app.get("/candidates/{candidate_id}/report")
    async def candidate_report(candidate_id: str):
        return bench.candidate(candidate_id).holdout_report.to_doc()

    # --- sessions ----------------------------------------------------------------

    @app.post("/sessions")
    async def create_session(request: Request):
        doc = await body_of(request)
        (dataset_id,) = require(doc, "datasetId")
        return bench.create_session(dataset_id, doc.get("sessionId")).to_doc()

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return bench.session(session_id).to_doc()

    @app.post("/sessions/{session_id}/advance")
    async def advance_session(session_id: str, request: Request):
        doc = await body_of(request)
        (event,) = require(doc, "event")
        payload = {}
        if "specId" in doc:
            payload["spec_id"] = doc["specId"]
        if "searchId" in doc:
            payload["search_id"] = doc["searchId"]
        return bench.advance_session(session_id, event, **payload).to_doc()

    @app.post("/sessions/{session_id}/selections")
    async def select(session_id: str, request: Request):
        doc = await body_of(request)
        candidate_ids, user_ranks = require(doc, "candidateIds", "userRanks")
        return bench.select_candidates(session_id, candidate_ids, user_ranks).to_doc()

    @app.post("/sessions/{session_id}/export")
    async def export(session_id: str):
        artifacts = bench.export_session(session_id)
        return {
            "artifacts": [
                {
                    "candidateId": a.candidate_id,
                    "userRank": a.user_rank,
                    "modelPath": a.model_path,
                    "cardPath": a.card_path,
                }
                for a in artifacts
            ]
        }

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    return app


def serve(config: dict) -> None:
    """Run the API over HTTP.  config: port, dataDir, exportDir, workers."""
    import uvicorn

    bench = Workbench(
        data_dir=config["dataDir"],
        export_dir=config["exportDir"],
        search_workers=int(config.get("workers", 2)),
    )
    app = create_app(bench)
    uvicorn.run(app, host=config.get("host", "127.0.0.1"), port=int(config["port"]))
