import json

import numpy as np
import pytest

from emabench import ingest
from emabench.canonical import FORMAT_VERSION, canonical_bytes, sha256_hex
from emabench.errors import (
    ArtifactCorruptError,
    ArtifactVersionError,
    DuplicateRankError,
    EmptySelectionError,
    IllegalTransitionError,
    NotFoundError,
)
from emabench.evaluation import make_split
from emabench.learners import default_descriptor, fit, kinds_for, predict
from emabench.problemgen import TaskType, enumerate_specs
from emabench.search import SearchRequest, run_search
from emabench.session import (
    EVENTS,
    TRANSITIONS,
    SessionState,
    SessionStore,
    WorkflowStep,
    advance,
    export_selected,
    load_artifact,
    select_candidates,
)

LEGAL_EDGES = {
    (1, 2), (2, 1), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 3), (6, 3), (7, 3),
}


def _fresh(step=WorkflowStep.dataExploration) -> SessionState:
    return SessionState(id="s1", dataset_id="ds-x", step=step)


class TestTransitionMatrix:
    def test_exhaustive_step_event_matrix(self):
        accepted_edges = set()
        for step in WorkflowStep:
            for event in EVENTS:
                state = _fresh(step)
                try:
                    after = advance(state, event)
                except IllegalTransitionError:
                    continue
                accepted_edges.add((int(step), int(after.step)))
        assert accepted_edges == LEGAL_EDGES

    def test_transition_table_matches_edge_list(self):
        edges = {(int(src), int(dst)) for (src, _), dst in TRANSITIONS.items()}
        assert edges == LEGAL_EDGES

    def test_retry_problem_returns_to_step_three(self):
        state = _fresh(WorkflowStep.modelExploration)
        state = advance(state, "retryProblem")
        assert state.step is WorkflowStep.problemSpecification

    def test_forward_edge_one_to_two(self):
        state = advance(_fresh(), "exploreProblems")
        assert state.step is WorkflowStep.problemExploration

    def test_illegal_transition_names_step_and_event(self):
        with pytest.raises(IllegalTransitionError) as err:
            advance(_fresh(WorkflowStep.problemExploration), "selectModels")
        assert err.value.details["step"] == "problemExploration"
        assert err.value.details["event"] == "selectModels"

    def test_event_log_grows_by_exactly_one(self):
        state = _fresh()
        lengths = [len(state.event_log)]
        for event in ("exploreProblems", "backToData", "exploreProblems", "specifyProblem"):
            state = advance(state, event)
            lengths.append(len(state.event_log))
        assert lengths == [0, 1, 2, 3, 4]
        for illegal in ("selectModels", "exportModels"):
            with pytest.raises(IllegalTransitionError):
                advance(state, illegal)
        assert len(state.event_log) == 4  # unchanged by rejected events

    def test_searches_retained_on_retry(self):
        state = _fresh(WorkflowStep.modelExploration)
        state = SessionState(
            id=state.id,
            dataset_id=state.dataset_id,
            step=state.step,
            search_ids=("srch-1",),
        )
        after = advance(state, "retryProblem")
        assert after.search_ids == ("srch-1",)


class TestSelect:
    def test_select_records_user_ranking(self):
        state = _fresh(WorkflowStep.modelSelection)
        after = select_candidates(state, ["cand-3"], [1], {"cand-2", "cand-3"})
        assert after.selections == (("cand-3", 1),)

    def test_select_two_with_ranks(self):
        state = _fresh(WorkflowStep.modelSelection)
        after = select_candidates(
            state, ["cand-a", "cand-b"], [1, 2], {"cand-a", "cand-b"}
        )
        assert after.selections == (("cand-a", 1), ("cand-b", 2))

    def test_duplicate_rank_rejected(self):
        state = _fresh(WorkflowStep.modelSelection)
        with pytest.raises(DuplicateRankError):
            select_candidates(state, ["a", "b"], [1, 1], {"a", "b"})

    def test_unknown_candidate_rejected(self):
        state = _fresh(WorkflowStep.modelSelection)
        with pytest.raises(NotFoundError):
            select_candidates(state, ["ghost"], [1], {"a"})

    def test_wrong_step_rejected(self):
        with pytest.raises(IllegalTransitionError):
            select_candidates(_fresh(), ["a"], [1], {"a"})


def _search_candidates(bundle, target, metric, budget=4, seed=5):
    spec = [
        s for s in enumerate_specs(bundle) if s.target == target and s.metric == metric
    ][0]
    request = SearchRequest(spec_id=spec.id, budget=budget, top_k=budget, seed=seed)
    return spec, run_search(request, bundle, spec)


def _exported_session(tmp_path, bundle, spec, candidates, picks):
    state = SessionState(
        id="sess-test",
        dataset_id=bundle.id,
        step=WorkflowStep.exportModels,
        selections=tuple(picks),
    )
    by_id = {c.id: c for c in candidates}
    return export_selected(
        state,
        tmp_path / "exports",
        resolve=lambda cid: by_id[cid],
        spec_doc_for=lambda _sid: spec.to_doc(),
        dataset_meta=bundle.meta,
        row_count=bundle.row_count,
    )


class TestExport:
    def test_round_trip_predictions_identical(self, mpg_bundle, tmp_path):
        spec, candidates = _search_candidates(mpg_bundle, "mpg", "mse")
        ridge = next(
            c for c in candidates if c.descriptor.family == "ridgeRegression"
        )
        artifacts, _ = _exported_session(
            tmp_path, mpg_bundle, spec, candidates, [(ridge.id, 1)]
        )
        model, card = load_artifact(artifacts[0].model_path)
        holdout = mpg_bundle.records(list(ridge.split.holdout_row_ids))
        original = predict(ridge.model, holdout)
        reloaded = predict(model, holdout)
        assert np.array_equal(original, reloaded)  # bit-exact
        assert card["scores"] == ridge.holdout_report.scores

    def test_model_card_records_split_provenance(self, kids_bundle, tmp_path):
        spec, candidates = _search_candidates(kids_bundle, "Goal", "accuracy")
        chosen = candidates[0]
        artifacts, _ = _exported_session(
            tmp_path, kids_bundle, spec, candidates, [(chosen.id, 1)]
        )
        card = artifacts[0].card
        assert card["split"]["strategy"] == "stratified"
        assert card["split"]["seed"] == 5
        assert card["split"]["holdoutFraction"] == 0.25
        assert card["pipeline"]["family"] == chosen.descriptor.family
        assert card["dataset"]["rowCount"] == 478
        assert card["userRank"] == 1

    def test_export_without_selection_errors(self, mpg_bundle, tmp_path):
        state = SessionState(
            id="empty", dataset_id=mpg_bundle.id, step=WorkflowStep.exportModels
        )
        with pytest.raises(EmptySelectionError):
            export_selected(
                state,
                tmp_path,
                resolve=lambda cid: None,
                spec_doc_for=lambda sid: {},
                dataset_meta=mpg_bundle.meta,
                row_count=mpg_bundle.row_count,
            )

    def test_flipped_byte_fails_checksum(self, mpg_bundle, tmp_path):
        spec, candidates = _search_candidates(mpg_bundle, "mpg", "mse")
        artifacts, _ = _exported_session(
            tmp_path, mpg_bundle, spec, candidates, [(candidates[0].id, 1)]
        )
        path = artifacts[0].model_path
        data = bytearray(open(path, "rb").read())
        target = data.find(b'"payload"') + 30
        data[target] = data[target] ^ 0x01
        open(path, "wb").write(bytes(data))
        with pytest.raises((ArtifactCorruptError,)):
            load_artifact(path)

    def test_newer_format_version_names_both(self, tmp_path):
        body = {"formatVersion": FORMAT_VERSION + 1, "payload": {"kind": "modelBlock"}}
        body["checksum"] = sha256_hex(canonical_bytes(body))
        path = tmp_path / "future.model.json"
        path.write_bytes(canonical_bytes(body))
        with pytest.raises(ArtifactVersionError) as err:
            load_artifact(path)
        assert err.value.details["found"] == FORMAT_VERSION + 1
        assert err.value.details["supported"] == FORMAT_VERSION

    def test_round_trip_every_family(
        self, kids_bundle, mpg_bundle, series_bundle, ratings_bundle, tmp_path
    ):
        """Every family in the zoo: export -> load -> predict is bit-exact."""
        from emabench.canonical import dump_artifact, load_artifact_bytes
        from emabench.learners import FittedModel, families

        cases = [
            (kids_bundle, "Goal", TaskType.classification),
            (mpg_bundle, "mpg", TaskType.regression),
            (series_bundle, "demand", TaskType.forecasting),
            (ratings_bundle, "rating", TaskType.collaborativeFiltering),
        ]
        checked = []
        for bundle, target, task in cases:
            spec = [
                s
                for s in enumerate_specs(bundle)
                if s.target == target and s.task is task
            ][0]
            split = make_split(bundle, spec, seed=13)
            train = bundle.records(list(split.train_row_ids))
            holdout = bundle.records(list(split.holdout_row_ids))
            kinds = kinds_for(bundle)
            for family, grid in families(task, declared_season=bundle.meta.season):
                descriptor = default_descriptor(task, family, grid[0])
                model = fit(descriptor, train, spec, kinds, seed=13)
                blob = dump_artifact({"kind": "modelBlock", "model": model.to_doc()})
                clone = FittedModel.from_doc(load_artifact_bytes(blob)["model"])
                a = predict(model, holdout)
                b = predict(clone, holdout)
                assert np.array_equal(a, b), family
                checked.append(family)
        assert len(checked) == 14  # 5 cls + 4 reg + 3 fc + 2 cf


class TestStore:
    def test_snapshot_and_resume(self, tmp_path):
        store = SessionStore(tmp_path / "sessions")
        store.create("s1", "ds-1")
        store.mutate("s1", lambda s: advance(s, "exploreProblems"))
        store.mutate("s1", lambda s: advance(s, "specifyProblem", spec_id="spec-a"))

        resumed = SessionStore(tmp_path / "sessions")
        state = resumed.get("s1")
        assert state.step is WorkflowStep.problemSpecification
        assert state.active_spec_id == "spec-a"
        assert [e["event"] for e in state.event_log] == [
            "exploreProblems",
            "specifyProblem",
        ]

    def test_unknown_session(self, tmp_path):
        store = SessionStore(tmp_path / "sessions")
        with pytest.raises(NotFoundError):
            store.get("missing")

    def test_snapshot_file_is_valid_json(self, tmp_path):
        store = SessionStore(tmp_path / "sessions")
        store.create("s2", "ds-2")
        doc = json.loads((tmp_path / "sessions" / "s2.json").read_text())
        assert doc["formatVersion"] == FORMAT_VERSION
