"""Facade over the whole workflow, backed by a data directory.

Everything the gateway (HTTP or CLI) can do goes through here: ingest,
summaries, problem enumeration, asynchronous searches, sessions, export.
All state round-trips through canonical files, so a restarted workbench
serves identical read responses.
"""
from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Optional

from . import problemgen, session as session_mod
from .canonical import dump_artifact, load_artifact_bytes
from .dataset import DatasetBundle, ingest, rows_matching, serialize_bundle, summarize
from .errors import BadRequestError, NotFoundError
from .evaluation import DEFAULT_HOLDOUT_FRACTION, EvalReport, SplitPlan
from .learners import FittedModel
from .problemgen import ProblemSpec
from .search import CandidateModel, SearchRegistry, SearchRequest
from .session import SessionState, SessionStore, WorkflowStep


class Workbench:
    def __init__(
        self,
        data_dir,
        export_dir,
        search_workers: int = 2,
        eval_workers: int = 1,
    ):
        self.data_dir = Path(data_dir)
        self.export_dir = Path(export_dir)
        for sub in ("datasets", "specs", "searches"):
            (self.data_dir / sub).mkdir(parents=True, exist_ok=True)
        self.export_dir.mkdir(parents=True, exist_ok=True)
        self.registry = SearchRegistry(
            max_workers=search_workers, eval_workers=eval_workers
        )
        self.sessions = SessionStore(self.data_dir / "sessions")
        self._bundles: dict[str, DatasetBundle] = {}
        self._specs: dict[str, ProblemSpec] = {}
        self._candidate_index: dict[str, str] = {}  # candidate id -> search id
        self._lock = threading.Lock()

    # --- datasets -----------------------------------------------------------

    def ingest(self, csv_text, schema_doc: dict) -> DatasetBundle:
        bundle = ingest(csv_text, schema_doc)
        csv_out, schema_out = serialize_bundle(bundle)
        base = self.data_dir / "datasets" / bundle.id
        base.with_suffix(".csv").write_text(csv_out, encoding="utf-8")
        base.with_suffix(".schema.json").write_text(
            json.dumps(schema_out, indent=2, sort_keys=True), encoding="utf-8"
        )
        with self._lock:
            self._bundles[bundle.id] = bundle
        return bundle

    def bundle(self, dataset_id: str) -> DatasetBundle:
        with self._lock:
            if dataset_id in self._bundles:
                return self._bundles[dataset_id]
        base = self.data_dir / "datasets" / dataset_id
        csv_path = base.with_suffix(".csv")
        schema_path = base.with_suffix(".schema.json")
        if not csv_path.exists() or not schema_path.exists():
            raise NotFoundError("dataset", dataset_id)
        bundle = ingest(
            csv_path.read_text(encoding="utf-8"),
            json.loads(schema_path.read_text(encoding="utf-8")),
        )
        with self._lock:
            self._bundles[bundle.id] = bundle
        return bundle

    def dataset_ids(self) -> list[str]:
        on_disk = {
            p.name[: -len(".csv")]
            for p in (self.data_dir / "datasets").glob("*.csv")
        }
        with self._lock:
            on_disk.update(self._bundles)
        return sorted(on_disk)

    def summary(self, dataset_id: str, bin_count: int = 10):
        return summarize(self.bundle(dataset_id), bin_count)

    def matching_rows(self, dataset_id: str, selector: dict) -> list[int]:
        return sorted(rows_matching(self.bundle(dataset_id), selector))

    def rows(self, dataset_id: str, offset: int = 0, limit: int = 50) -> list[dict]:
        bundle = self.bundle(dataset_id)
        ids = range(len(bundle.rows))[offset : offset + limit]
        out = []
        for rec in bundle.records(list(ids)):
            out.append(
                {
                    k: (v.isoformat() if hasattr(v, "isoformat") else v)
                    for k, v in rec.items()
                }
            )
        return out

    # --- problem specs --------------------------------------------------------

    def _store_spec(self, spec: ProblemSpec) -> ProblemSpec:
        path = self.data_dir / "specs" / f"{spec.id}.json"
        if not path.exists():
            path.write_text(
                json.dumps(spec.to_doc(), indent=2, sort_keys=True), encoding="utf-8"
            )
        with self._lock:
            self._specs[spec.id] = spec
        return spec

    def problems(self, dataset_id: str) -> list[ProblemSpec]:
        specs = problemgen.enumerate_specs(self.bundle(dataset_id))
        return [self._store_spec(s) for s in specs]

    def spec(self, spec_id: str) -> ProblemSpec:
        with self._lock:
            if spec_id in self._specs:
                return self._specs[spec_id]
        path = self.data_dir / "specs" / f"{spec_id}.json"
        if not path.exists():
            raise NotFoundError("spec", spec_id)
        spec = problemgen.spec_from_doc(json.loads(path.read_text(encoding="utf-8")))
        with self._lock:
            self._specs[spec.id] = spec
        return spec

    def create_spec(self, fields: dict) -> ProblemSpec:
        dataset_id = fields.get("datasetId")
        if not dataset_id:
            raise BadRequestError("datasetId is required")
        bundle = self.bundle(dataset_id)
        return self._store_spec(problemgen.create_spec(bundle, fields))

    def refine_spec(
        self,
        spec_id: str,
        remove_features: list[str] = (),
        set_metric: Optional[str] = None,
    ) -> ProblemSpec:
        spec = self.spec(spec_id)
        bundle = self.bundle(spec.dataset_id)
        refined = problemgen.refine_spec(bundle, spec, remove_features, set_metric)
        return self._store_spec(refined)

    # --- searches -------------------------------------------------------------

    def submit_search(
        self,
        spec_id: str,
        budget: int,
        top_k: int,
        seed: int = 0,
        holdout_fraction: float = DEFAULT_HOLDOUT_FRACTION,
    ) -> str:
        spec = self.spec(spec_id)
        bundle = self.bundle(spec.dataset_id)
        request = SearchRequest(
            spec_id=spec_id,
            budget=budget,
            top_k=top_k,
            seed=seed,
            holdout_fraction=holdout_fraction,
        )
        return self.registry.submit(request, bundle, spec, on_done=self._persist_search)

    def _persist_search(
        self, search_id: str, request: SearchRequest, candidates: list[CandidateModel]
    ) -> None:
        spec = self.spec(request.spec_id)
        doc = {
            "searchId": search_id,
            "request": request.to_doc(),
            "datasetId": spec.dataset_id,
            "candidates": [
                {
                    "id": c.id,
                    "rank": c.rank,
                    "cvScore": c.cv_score,
                    "descriptor": c.descriptor.to_doc(),
                    "model": c.model.to_doc(),
                    "report": c.holdout_report.to_doc(),
                    "split": c.split.to_doc(),
                }
                for c in candidates
            ],
        }
        path = self.data_dir / "searches" / f"{search_id}.json"
        path.write_bytes(dump_artifact(doc))
        with self._lock:
            for c in candidates:
                self._candidate_index[c.id] = search_id

    def _load_search(self, search_id: str) -> bool:
        path = self.data_dir / "searches" / f"{search_id}.json"
        if not path.exists():
            return False
        doc = load_artifact_bytes(path.read_bytes())
        request = SearchRequest(
            spec_id=doc["request"]["specId"],
            budget=doc["request"]["budget"],
            top_k=doc["request"]["topK"],
            seed=doc["request"]["seed"],
            holdout_fraction=doc["request"]["holdoutFraction"],
        )
        candidates = []
        for entry in doc["candidates"]:
            candidates.append(
                CandidateModel(
                    id=entry["id"],
                    descriptor=FittedModel.from_doc(entry["model"]).descriptor,
                    cv_score=entry["cvScore"],
                    holdout_report=EvalReport.from_doc(entry["report"]),
                    rank=entry["rank"],
                    model=FittedModel.from_doc(entry["model"]),
                    split=SplitPlan.from_doc(entry["split"]),
                )
            )
        self.registry.restore(search_id, request, candidates)
        with self._lock:
            for c in candidates:
                self._candidate_index[c.id] = search_id
        return True

    def search_status(self, search_id: str):
        try:
            return self.registry.status(search_id)
        except NotFoundError:
            if self._load_search(search_id):
                return self.registry.status(search_id)
            raise

    def wait_search(self, search_id: str, timeout: Optional[float] = None) -> None:
        self.registry.wait(search_id, timeout)

    def candidates(self, search_id: str) -> list[CandidateModel]:
        try:
            return self.registry.candidates(search_id)
        except NotFoundError:
            if self._load_search(search_id):
                return self.registry.candidates(search_id)
            raise

    def candidate(self, candidate_id: str) -> CandidateModel:
        with self._lock:
            search_id = self._candidate_index.get(candidate_id)
        if search_id is None:
            for path in (self.data_dir / "searches").glob("*.json"):
                self._load_search(path.stem)
            with self._lock:
                search_id = self._candidate_index.get(candidate_id)
        if search_id is None:
            raise NotFoundError("candidate", candidate_id)
        for cand in self.candidates(search_id):
            if cand.id == candidate_id:
                return cand
        raise NotFoundError("candidate", candidate_id)

    def search_id_of(self, candidate_id: str) -> str:
        self.candidate(candidate_id)
        with self._lock:
            return self._candidate_index[candidate_id]

    # --- sessions ---------------------------------------------------------------

    def create_session(
        self, dataset_id: str, session_id: Optional[str] = None
    ) -> SessionState:
        self.bundle(dataset_id)  # existence check
        if session_id is None:
            stem = dataset_id.split("-")[-1][:8]
            existing = set(self.sessions.ids())
            k = 1
            while f"sess-{stem}-{k}" in existing:
                k += 1
            session_id = f"sess-{stem}-{k}"
        return self.sessions.create(session_id, dataset_id)

    def session(self, session_id: str) -> SessionState:
        return self.sessions.get(session_id)

    def advance_session(self, session_id: str, event: str, **payload) -> SessionState:
        if payload.get("spec_id"):
            self.spec(payload["spec_id"])  # existence check
        return self.sessions.mutate(
            session_id, lambda s: session_mod.advance(s, event, **payload)
        )

    def set_active_spec(self, session_id: str, spec_id: str) -> SessionState:
        """Swap the active spec while already at step 3 (no transition)."""
        self.spec(spec_id)

        def apply(state: SessionState) -> SessionState:
            if state.step is not WorkflowStep.problemSpecification:
                raise BadRequestError(
                    "active spec can only be swapped at the problem-specification step"
                )
            spec_ids = state.spec_ids
            if spec_id not in spec_ids:
                spec_ids = spec_ids + (spec_id,)
            return session_mod.replace_state(
                state, active_spec_id=spec_id, spec_ids=spec_ids
            )

        return self.sessions.mutate(session_id, apply)

    def select_candidates(
        self, session_id: str, candidate_ids: list[str], user_ranks: list[int]
    ) -> SessionState:
        known = set()
        for cid in candidate_ids:
            self.candidate(cid)
            known.add(cid)
        return self.sessions.mutate(
            session_id,
            lambda s: session_mod.select_candidates(
                s, candidate_ids, user_ranks, known
            ),
        )

    def export_session(self, session_id: str):
        state = self.sessions.get(session_id)
        bundle = self.bundle(state.dataset_id)
        artifacts_box = {}

        def apply(s: SessionState) -> SessionState:
            artifacts, new_state = session_mod.export_selected(
                s,
                self.export_dir,
                resolve=self.candidate,
                spec_doc_for=lambda spec_id: self.spec(spec_id).to_doc(),
                dataset_meta=bundle.meta,
                row_count=bundle.row_count,
            )
            artifacts_box["artifacts"] = artifacts
            return new_state

        self.sessions.mutate(session_id, apply)
        return artifacts_box["artifacts"]
