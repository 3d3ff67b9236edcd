import time

import pytest

from emabench import ingest
from emabench.canonical import canonical_json
from emabench.errors import MetricInputError, NotFoundError, SearchFailedError
from emabench.problemgen import TaskType, create_spec, enumerate_specs, higher_is_better
from emabench.search import (
    CandidateModel,
    SearchRegistry,
    SearchRequest,
    enumerate_grid,
    rank_candidates,
    run_search,
)


def _mpg_spec(mpg_bundle, metric="mse"):
    return [
        s
        for s in enumerate_specs(mpg_bundle)
        if s.target == "mpg" and s.metric == metric
    ][0]


class TestGridEnumeration:
    def test_round_robin_prefix_spans_families(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        grid = enumerate_grid(spec)
        assert len(grid) == 12
        first_four = [d.family for d in grid[:4]]
        assert first_four == [
            "meanBaseline",
            "ridgeRegression",
            "kNNRegressor",
            "regressionTree",
        ]

    def test_classification_grid_is_thirteen(self, kids_bundle):
        spec = [
            s for s in enumerate_specs(kids_bundle) if s.target == "Goal"
        ][0]
        assert len(enumerate_grid(spec)) == 13


class TestRunSearch:
    def test_budget_six_returns_exactly_six(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        request = SearchRequest(spec_id=spec.id, budget=6, top_k=6, seed=7)
        candidates = run_search(request, mpg_bundle, spec)
        assert len(candidates) == 6
        assert [c.rank for c in candidates] == [1, 2, 3, 4, 5, 6]
        scores = [c.holdout_report.scores["mse"] for c in candidates]
        assert scores == sorted(scores)  # lower is better, nondecreasing

    def test_top_k_one_returns_single_best(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        request = SearchRequest(spec_id=spec.id, budget=6, top_k=1, seed=7)
        best = run_search(request, mpg_bundle, spec)
        assert len(best) == 1
        assert best[0].rank == 1
        full = run_search(
            SearchRequest(spec_id=spec.id, budget=6, top_k=6, seed=7), mpg_bundle, spec
        )
        assert best[0].id == full[0].id

    def test_deterministic_across_runs_and_workers(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        request = SearchRequest(spec_id=spec.id, budget=8, top_k=8, seed=3)

        def snapshot(cands):
            return canonical_json(
                [
                    {
                        "id": c.id,
                        "rank": c.rank,
                        "cv": c.cv_score,
                        "scores": c.holdout_report.scores,
                    }
                    for c in cands
                ]
            )

        a = snapshot(run_search(request, mpg_bundle, spec))
        b = snapshot(run_search(request, mpg_bundle, spec))
        parallel = snapshot(run_search(request, mpg_bundle, spec, eval_workers=4))
        assert a == b == parallel

    def test_tied_scores_use_documented_order(self):
        # constant target: every family predicts it perfectly, all scores tie
        lines = ["x,y"] + [f"{float(i)!r},5.0" for i in range(24)]
        bundle = ingest(
            "\n".join(lines) + "\n",
            {
                "name": "const",
                "resourceShape": "tabular",
                "columns": [
                    {"name": "x", "kind": "numeric"},
                    {"name": "y", "kind": "numeric"},
                ],
            },
        )
        spec = create_spec(
            bundle,
            {
                "datasetId": bundle.id,
                "taskType": "regression",
                "target": "y",
                "metric": "mse",
                "features": ["x"],
            },
        )
        request = SearchRequest(spec_id=spec.id, budget=12, top_k=12, seed=1)
        candidates = run_search(request, bundle, spec)
        assert all(c.holdout_report.scores["mse"] == 0.0 for c in candidates)
        keys = [
            (c.descriptor.family, canonical_json(c.descriptor.hyperparameters))
            for c in candidates
        ]
        assert keys == sorted(keys)

    def test_diversity_cap(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        request = SearchRequest(spec_id=spec.id, budget=12, top_k=4, seed=7)
        candidates = run_search(request, mpg_bundle, spec)
        assert len(candidates) == 4
        per_family = {}
        for c in candidates:
            per_family[c.descriptor.family] = per_family.get(c.descriptor.family, 0) + 1
        assert max(per_family.values()) <= 2  # ceil(4/2)
        assert len(per_family) >= 2

    def test_every_candidate_scores_include_spec_metric(self, kids_bundle):
        spec = [
            s
            for s in enumerate_specs(kids_bundle)
            if s.target == "Goal" and s.metric == "f1Macro"
        ][0]
        request = SearchRequest(spec_id=spec.id, budget=4, top_k=4, seed=2)
        for c in run_search(request, kids_bundle, spec):
            assert "f1Macro" in c.holdout_report.scores

    def test_all_failures_raise_search_failed(self, mpg_bundle, monkeypatch):
        from emabench import search as search_mod
        from emabench.errors import DegenerateTrainingError

        def broken_fit(*args, **kwargs):
            raise DegenerateTrainingError("injected failure")

        monkeypatch.setattr(search_mod, "fit", broken_fit)
        spec = _mpg_spec(mpg_bundle)
        request = SearchRequest(spec_id=spec.id, budget=4, top_k=2, seed=1)
        with pytest.raises(SearchFailedError) as err:
            run_search(request, mpg_bundle, spec)
        assert err.value.family_errors  # per-family messages retained

    def test_failed_configs_are_skipped_not_fatal(self, mpg_bundle, monkeypatch):
        from emabench import search as search_mod

        real_fit = search_mod.fit
        from emabench.errors import DegenerateTrainingError

        def flaky_fit(descriptor, *args, **kwargs):
            if descriptor.family == "kNNRegressor":
                raise DegenerateTrainingError("injected")
            return real_fit(descriptor, *args, **kwargs)

        monkeypatch.setattr(search_mod, "fit", flaky_fit)
        spec = _mpg_spec(mpg_bundle)
        request = SearchRequest(spec_id=spec.id, budget=6, top_k=6, seed=7)
        candidates = run_search(request, mpg_bundle, spec)
        assert candidates  # others survived
        assert all(c.descriptor.family != "kNNRegressor" for c in candidates)


class TestRank:
    def _fake(self, scores, metric):
        out = []
        for i, s in enumerate(scores):
            report = type(
                "R", (), {"scores": {metric: s}}
            )()
            cand = CandidateModel(
                id=f"c{i}",
                descriptor=type(
                    "D", (), {"family": f"fam{i}", "hyperparameters": {}}
                )(),
                cv_score=0.0,
                holdout_report=report,
                rank=0,
                model=None,
                split=None,
            )
            out.append(cand)
        return out

    def test_higher_is_better_descending(self):
        cands = self._fake([0.9, 0.7, 0.8], "accuracy")
        ranked = rank_candidates(cands, "accuracy")
        assert [c.holdout_report.scores["accuracy"] for c in ranked] == [0.9, 0.8, 0.7]

    def test_lower_is_better_ascending(self):
        cands = self._fake([1.2, 0.4], "mse")
        ranked = rank_candidates(cands, "mse")
        assert [c.holdout_report.scores["mse"] for c in ranked] == [0.4, 1.2]

    def test_reranking_is_stable(self):
        cands = self._fake([0.5, 0.5, 0.9], "accuracy")
        once = rank_candidates(list(cands), "accuracy")
        twice = rank_candidates(list(once), "accuracy")
        assert [c.id for c in once] == [c.id for c in twice]

    def test_metric_missing_from_report(self):
        cands = self._fake([0.5], "accuracy")
        with pytest.raises(MetricInputError):
            rank_candidates(cands, "f1Macro")

    def test_direction_table(self):
        assert higher_is_better("accuracy")
        assert higher_is_better("r2")
        assert not higher_is_better("mse")
        assert not higher_is_better("mape")


class TestRegistry:
    def test_lifecycle(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        registry = SearchRegistry(max_workers=1)
        request = SearchRequest(spec_id=spec.id, budget=4, top_k=4, seed=9)
        search_id = registry.submit(request, mpg_bundle, spec)
        status = registry.status(search_id)
        assert status.state in ("queued", "running", "done")
        registry.wait(search_id)
        status = registry.status(search_id)
        assert status.state == "done"
        assert status.evaluated == status.total <= request.budget
        assert len(registry.candidates(search_id)) == 4

    def test_unknown_search_id(self):
        registry = SearchRegistry()
        with pytest.raises(NotFoundError):
            registry.status("srch-nope")

    def test_resubmit_same_request_is_idempotent(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        registry = SearchRegistry(max_workers=1)
        request = SearchRequest(spec_id=spec.id, budget=3, top_k=3, seed=4)
        a = registry.submit(request, mpg_bundle, spec)
        b = registry.submit(request, mpg_bundle, spec)
        assert a == b
        registry.wait(a)

    def test_status_monotone_progress(self, mpg_bundle):
        spec = _mpg_spec(mpg_bundle)
        registry = SearchRegistry(max_workers=1)
        request = SearchRequest(spec_id=spec.id, budget=12, top_k=3, seed=8)
        search_id = registry.submit(request, mpg_bundle, spec)
        seen = []
        deadline = time.time() + 30
        while time.time() < deadline:
            status = registry.status(search_id)
            seen.append(status.evaluated)
            if status.state == "done":
                break
            time.sleep(0.005)
        assert seen == sorted(seen)
        assert registry.status(search_id).state == "done"
