"""Workflow state machine, model selection, and provenance-rich export.

The seven steps run 1..7 with backward edges only to step 3 (retry another
problem) plus free browsing between steps 1 and 2.  Every accepted event is
appended to an immutable log; state objects are replaced, never mutated.

Export artifacts are two files per selection: a model block (everything
needed to reproduce predictions bit-exactly) and a model card (spec, all
holdout scores, split description, pipeline, dataset metadata, user rank).
Both use the canonical checksummed container, so identical runs produce
byte-identical files.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from typing import Callable, Optional

from .canonical import dump_artifact, load_artifact_bytes
from .dataset import DatasetMeta
from .errors import (
    ArtifactCorruptError,
    DuplicateRankError,
    EmptySelectionError,
    IllegalTransitionError,
    NotFoundError,
)
from .learners import FittedModel
from .search import CandidateModel

SESSION_FORMAT_VERSION = 1


class WorkflowStep(IntEnum):
    dataExploration = 1
    problemExploration = 2
    problemSpecification = 3
    modelTraining = 4
    modelExploration = 5
    modelSelection = 6
    exportModels = 7


EVENTS = (
    "exploreProblems",
    "backToData",
    "specifyProblem",
    "startSearch",
    "exploreModels",
    "selectModels",
    "exportModels",
    "retryProblem",
)

#: the complete legal transition graph: (step, event) -> next step
TRANSITIONS: dict[tuple[WorkflowStep, str], WorkflowStep] = {
    (WorkflowStep.dataExploration, "exploreProblems"): WorkflowStep.problemExploration,
    (WorkflowStep.problemExploration, "backToData"): WorkflowStep.dataExploration,
    (WorkflowStep.problemExploration, "specifyProblem"): WorkflowStep.problemSpecification,
    (WorkflowStep.problemSpecification, "startSearch"): WorkflowStep.modelTraining,
    (WorkflowStep.modelTraining, "exploreModels"): WorkflowStep.modelExploration,
    (WorkflowStep.modelExploration, "selectModels"): WorkflowStep.modelSelection,
    (WorkflowStep.modelSelection, "exportModels"): WorkflowStep.exportModels,
    (WorkflowStep.modelExploration, "retryProblem"): WorkflowStep.problemSpecification,
    (WorkflowStep.modelSelection, "retryProblem"): WorkflowStep.problemSpecification,
    (WorkflowStep.exportModels, "retryProblem"): WorkflowStep.problemSpecification,
}


def legal_events(step: WorkflowStep) -> list[str]:
    return [event for (src, event) in TRANSITIONS if src == step]


def replace_state(state: "SessionState", **changes) -> "SessionState":
    """Field-level replacement for store-internal bookkeeping (not an event)."""
    return replace(state, **changes)


@dataclass(frozen=True)
class SessionState:
    id: str
    dataset_id: str
    step: WorkflowStep = WorkflowStep.dataExploration
    spec_ids: tuple[str, ...] = ()
    active_spec_id: Optional[str] = None
    search_ids: tuple[str, ...] = ()
    selections: tuple[tuple[str, int], ...] = ()  # (candidateId, userRank)
    exports: tuple[str, ...] = ()
    event_log: tuple[dict, ...] = ()

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "datasetId": self.dataset_id,
            "step": int(self.step),
            "stepName": self.step.name,
            "specIds": list(self.spec_ids),
            "activeSpecId": self.active_spec_id,
            "searchIds": list(self.search_ids),
            "selections": [
                {"candidateId": c, "userRank": r} for c, r in self.selections
            ],
            "exports": list(self.exports),
            "eventLog": [dict(e) for e in self.event_log],
            "legalEvents": legal_events(self.step),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SessionState":
        return cls(
            id=doc["id"],
            dataset_id=doc["datasetId"],
            step=WorkflowStep(doc["step"]),
            spec_ids=tuple(doc["specIds"]),
            active_spec_id=doc["activeSpecId"],
            search_ids=tuple(doc["searchIds"]),
            selections=tuple(
                (s["candidateId"], s["userRank"]) for s in doc["selections"]
            ),
            exports=tuple(doc["exports"]),
            event_log=tuple(doc["eventLog"]),
        )


def advance(state: SessionState, event: str, **payload) -> SessionState:
    """Apply one transition event; illegal (step, event) pairs are rejected.

    ``specifyProblem`` accepts ``spec_id=`` to set the active spec;
    ``startSearch`` accepts ``search_id=`` to attach a search to the session.
    """
    key = (state.step, event)
    if key not in TRANSITIONS:
        raise IllegalTransitionError(step=state.step.name, event=event)
    target = TRANSITIONS[key]
    entry = {
        "seq": len(state.event_log),
        "event": event,
        "fromStep": int(state.step),
        "toStep": int(target),
    }
    changes: dict = {
        "step": target,
        "event_log": state.event_log + (entry,),
    }
    if event == "specifyProblem" and payload.get("spec_id"):
        spec_id = payload["spec_id"]
        changes["active_spec_id"] = spec_id
        if spec_id not in state.spec_ids:
            changes["spec_ids"] = state.spec_ids + (spec_id,)
    if event == "startSearch" and payload.get("search_id"):
        search_id = payload["search_id"]
        if search_id not in state.search_ids:
            changes["search_ids"] = state.search_ids + (search_id,)
    if event == "retryProblem":
        changes["selections"] = ()
    return replace(state, **changes)


def select_candidates(
    state: SessionState,
    candidate_ids: list[str],
    user_ranks: list[int],
    known_candidates: set[str],
) -> SessionState:
    """Record the user's preference ranking over chosen candidates (step 6)."""
    if state.step is not WorkflowStep.modelSelection:
        raise IllegalTransitionError(step=state.step.name, event="selectCandidates")
    if len(candidate_ids) != len(user_ranks):
        raise DuplicateRankError("candidateIds and userRanks differ in length")
    if len(set(user_ranks)) != len(user_ranks):
        raise DuplicateRankError(f"duplicate user ranks: {sorted(user_ranks)}")
    for cid in candidate_ids:
        if cid not in known_candidates:
            raise NotFoundError("candidate", cid)
    pairs = tuple(zip(candidate_ids, (int(r) for r in user_ranks)))
    return replace(state, selections=pairs)


# --- export -----------------------------------------------------------------


def model_block_doc(candidate: CandidateModel) -> dict:
    return {"kind": "modelBlock", "candidateId": candidate.id, "model": candidate.model.to_doc()}


def model_card_doc(
    candidate: CandidateModel,
    spec_doc: dict,
    dataset_meta: DatasetMeta,
    dataset_id: str,
    row_count: int,
    user_rank: int,
) -> dict:
    """Provenance card: spec, every holdout score, split description, pipeline.

    Wall-clock training duration is deliberately not serialized: artifacts of
    identical runs must be byte-identical.
    """
    split = candidate.split
    return {
        "kind": "modelCard",
        "candidateId": candidate.id,
        "userRank": int(user_rank),
        "searchRank": candidate.rank,
        "spec": spec_doc,
        "scores": candidate.holdout_report.scores,
        "perClassScores": candidate.holdout_report.per_class,
        "cvScore": candidate.cv_score,
        "split": {
            "strategy": split.strategy,
            "seed": split.seed,
            "holdoutFraction": split.holdout_fraction,
            "fallback": split.fallback,
            "trainRows": len(split.train_row_ids),
            "holdoutRows": len(split.holdout_row_ids),
        },
        "pipeline": candidate.descriptor.to_doc(),
        "dataset": {
            "id": dataset_id,
            "rowCount": row_count,
            **dataset_meta.to_doc(),
        },
    }


@dataclass
class ExportArtifact:
    candidate_id: str
    user_rank: int
    model_path: str
    card_path: str
    card: dict


def export_selected(
    state: SessionState,
    export_dir: Path,
    resolve: Callable[[str], CandidateModel],
    spec_doc_for: Callable[[str], dict],
    dataset_meta: DatasetMeta,
    row_count: int,
) -> tuple[list[ExportArtifact], SessionState]:
    """Write one (model block, model card) file pair per selection (step 7)."""
    if state.step is not WorkflowStep.exportModels:
        raise IllegalTransitionError(step=state.step.name, event="exportSelected")
    if not state.selections:
        raise EmptySelectionError("no candidates selected; nothing to export")

    out_dir = Path(export_dir) / state.id
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    for candidate_id, user_rank in state.selections:
        candidate = resolve(candidate_id)
        stem = f"rank{user_rank}-{candidate_id}"
        model_path = out_dir / f"{stem}.model.json"
        card_path = out_dir / f"{stem}.card.json"
        card = model_card_doc(
            candidate,
            spec_doc_for(candidate.model.spec_id),
            dataset_meta,
            state.dataset_id,
            row_count,
            user_rank,
        )
        model_path.write_bytes(dump_artifact(model_block_doc(candidate)))
        card_path.write_bytes(dump_artifact(card))
        artifacts.append(
            ExportArtifact(
                candidate_id=candidate_id,
                user_rank=user_rank,
                model_path=str(model_path),
                card_path=str(card_path),
                card=card,
            )
        )
    new_state = replace(
        state, exports=state.exports + tuple(a.model_path for a in artifacts)
    )
    return artifacts, new_state


def load_artifact(path) -> tuple[FittedModel, Optional[dict]]:
    """Load an exported model block (and its sibling card when present).

    Any checksum or format-version problem raises before a model is built.
    """
    path = Path(path)
    payload = load_artifact_bytes(path.read_bytes())
    if payload.get("kind") != "modelBlock":
        raise ArtifactCorruptError(
            f"expected a modelBlock artifact, found kind {payload.get('kind')!r}"
        )
    model = FittedModel.from_doc(payload["model"])
    card = None
    card_path = path.with_name(path.name.replace(".model.json", ".card.json"))
    if card_path.exists() and card_path != path:
        card = load_artifact_bytes(card_path.read_bytes())
    return model, card


class SessionStore:
    """Serialized per-session mutation with a snapshot after every change."""

    def __init__(self, directory: Path):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._states: dict[str, SessionState] = {}

    def create(self, session_id: str, dataset_id: str) -> SessionState:
        with self._lock:
            state = SessionState(id=session_id, dataset_id=dataset_id)
            self._states[session_id] = state
            self._snapshot(state)
            return state

    def get(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._states.get(session_id) or self._load(session_id)
        if state is None:
            raise NotFoundError("session", session_id)
        return state

    def ids(self) -> list[str]:
        known = set(self._states)
        known.update(p.stem for p in self._dir.glob("*.json"))
        return sorted(known)

    def mutate(self, session_id: str, fn: Callable[[SessionState], SessionState]):
        """Apply fn under the store lock and persist the result."""
        with self._lock:
            state = self._states.get(session_id) or self._load(session_id)
            if state is None:
                raise NotFoundError("session", session_id)
            new_state = fn(state)
            self._states[session_id] = new_state
            self._snapshot(new_state)
            return new_state

    def _path(self, session_id: str) -> Path:
        return self._dir / f"{session_id}.json"

    def _snapshot(self, state: SessionState) -> None:
        doc = {"formatVersion": SESSION_FORMAT_VERSION, "session": state.to_doc()}
        self._path(state.id).write_bytes(dump_artifact(doc))

    def _load(self, session_id: str) -> Optional[SessionState]:
        path = self._path(session_id)
        if not path.exists():
            return None
        payload = load_artifact_bytes(path.read_bytes())
        state = SessionState.from_doc(payload["session"])
        self._states[session_id] = state
        return state
