"""Bounded model search: grid expansion, internal CV, holdout ranking.

The grid is enumerated round-robin across families so truncated budgets stay
diverse.  Every configuration is scored by 3-fold cross-validation on the
training partition, refit on the full partition, evaluated on the holdout,
and the final list is ranked by the spec's metric under a per-family
diversity cap.  Results are a pure function of (bundle, spec, seed, budget):
parallel evaluation reduces by configuration index, never completion order.
"""
from __future__ import annotations

import math
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .canonical import canonical_json, short_hash
from .dataset import DatasetBundle
from .errors import (
    MetricInputError,
    NotFoundError,
    SearchFailedError,
    SpecInvalidError,
    WorkbenchError,
)
from .evaluation import DEFAULT_HOLDOUT_FRACTION, EvalReport, SplitPlan, build_report, compute_metric, make_split
from .learners import FittedModel, PipelineDescriptor, default_descriptor, families, fit, kinds_for, predict
from .problemgen import ProblemSpec, TaskType, higher_is_better

CV_FOLDS = 3


@dataclass(frozen=True)
class SearchRequest:
    spec_id: str
    budget: int
    top_k: int
    seed: int
    holdout_fraction: float = DEFAULT_HOLDOUT_FRACTION

    def __post_init__(self):
        if self.budget < 1:
            raise WorkbenchError(f"budget must be >= 1, got {self.budget}")
        if self.top_k < 1:
            raise WorkbenchError(f"topK must be >= 1, got {self.top_k}")

    def to_doc(self) -> dict:
        return {
            "specId": self.spec_id,
            "budget": self.budget,
            "topK": self.top_k,
            "seed": self.seed,
            "holdoutFraction": self.holdout_fraction,
        }


@dataclass
class CandidateModel:
    id: str
    descriptor: PipelineDescriptor
    cv_score: float
    holdout_report: EvalReport
    rank: int
    model: FittedModel
    split: SplitPlan

    def summary_doc(self) -> dict:
        return {
            "id": self.id,
            "rank": self.rank,
            "family": self.descriptor.family,
            "hyperparameters": dict(self.descriptor.hyperparameters),
            "cvScore": self.cv_score,
            "scores": self.holdout_report.scores,
        }


@dataclass
class SearchStatus:
    state: str  # queued | running | done | failed
    evaluated: int
    total: int
    error: Optional[dict] = None

    def to_doc(self) -> dict:
        doc = {"state": self.state, "evaluated": self.evaluated, "total": self.total}
        if self.error is not None:
            doc["error"] = self.error
        return doc


def enumerate_grid(
    spec: ProblemSpec, declared_season: Optional[int] = None
) -> list[PipelineDescriptor]:
    """Round-robin across families in canonical order: one grid point per
    family per round, so any budget prefix spans as many families as possible."""
    lanes = [
        (family, list(grid)) for family, grid in families(spec.task, declared_season)
    ]
    out: list[PipelineDescriptor] = []
    round_idx = 0
    while any(round_idx < len(grid) for _, grid in lanes):
        for family, grid in lanes:
            if round_idx < len(grid):
                out.append(default_descriptor(spec.task, family, grid[round_idx]))
        round_idx += 1
    return out


def _cv_folds(bundle: DatasetBundle, spec: ProblemSpec, train_ids: tuple, seed: int):
    """(fit ids, validate ids) pairs; stratified for classification, contiguous
    expanding windows for forecasting, seeded shuffle otherwise."""
    ids = list(train_ids)
    if spec.task is TaskType.forecasting:
        m = len(ids)
        cuts = [math.floor(m * f) for f in (0.4, 0.6, 0.8, 1.0)]
        folds = []
        for a, b in zip(cuts, cuts[1:]):
            if a >= 1 and b > a:
                folds.append((ids[:a], ids[a:b]))
        return folds

    rng = np.random.default_rng(seed)
    if spec.task is TaskType.classification:
        by_label: dict[str, list[int]] = {}
        for i in ids:
            by_label.setdefault(bundle.rows[i][spec.target], []).append(i)
        chunks: list[list[int]] = [[] for _ in range(CV_FOLDS)]
        for label in sorted(by_label):
            arr = np.asarray(by_label[label])
            arr = arr[rng.permutation(len(arr))]
            for f in range(CV_FOLDS):
                chunks[f].extend(int(x) for x in arr[f::CV_FOLDS])
    else:
        arr = np.asarray(ids)
        arr = arr[rng.permutation(len(arr))]
        chunks = [[int(x) for x in arr[f::CV_FOLDS]] for f in range(CV_FOLDS)]

    folds = []
    for f in range(CV_FOLDS):
        validate = sorted(chunks[f])
        train = sorted(x for g in range(CV_FOLDS) if g != f for x in chunks[g])
        if train and validate:
            folds.append((train, validate))
    return folds


def _score_config(
    descriptor: PipelineDescriptor,
    bundle: DatasetBundle,
    spec: ProblemSpec,
    folds,
    split: SplitPlan,
    seed: int,
) -> tuple[float, FittedModel, EvalReport]:
    kinds = kinds_for(bundle)
    fold_scores = []
    for fit_ids, validate_ids in folds:
        model = fit(descriptor, bundle.records(fit_ids), spec, kinds, seed)
        records = bundle.records(validate_ids)
        predictions = predict(model, records)
        truth = [bundle.rows[i][spec.target] for i in validate_ids]
        fold_scores.append(compute_metric(spec.metric, truth, list(predictions)))
    cv_score = float(np.mean(fold_scores)) if fold_scores else math.nan
    refit = fit(descriptor, bundle.records(list(split.train_row_ids)), spec, kinds, seed)
    report = build_report(refit, split, spec, bundle)
    return cv_score, refit, report


def _candidate_id(spec: ProblemSpec, seed: int, descriptor: PipelineDescriptor) -> str:
    return short_hash(
        {"spec": spec.id, "seed": seed, "descriptor": descriptor.to_doc()}, "cand"
    )


def rank_candidates(candidates: list[CandidateModel], metric: str) -> list[CandidateModel]:
    """Direction-aware sort by holdout score with the documented tie-break:
    family id lexicographic, then canonical hyperparameter order."""
    for cand in candidates:
        if metric not in cand.holdout_report.scores:
            raise MetricInputError(
                f"metric {metric!r} absent from candidate {cand.id} report"
            )
    sign = -1.0 if higher_is_better(metric) else 1.0

    def key(cand: CandidateModel):
        return (
            sign * cand.holdout_report.scores[metric],
            cand.descriptor.family,
            canonical_json(cand.descriptor.hyperparameters),
        )

    ordered = sorted(candidates, key=key)
    for i, cand in enumerate(ordered):
        cand.rank = i + 1
    return ordered


def _apply_diversity_cap(
    ordered: list[CandidateModel], top_k: int
) -> list[CandidateModel]:
    """At most ceil(topK/2) slots per family, backfilling by rank when the
    cap alone cannot fill topK."""
    cap = math.ceil(top_k / 2)
    taken: list[CandidateModel] = []
    counts: dict[str, int] = {}
    skipped: list[CandidateModel] = []
    for cand in ordered:
        if len(taken) == top_k:
            break
        family = cand.descriptor.family
        if counts.get(family, 0) < cap:
            counts[family] = counts.get(family, 0) + 1
            taken.append(cand)
        else:
            skipped.append(cand)
    for cand in skipped:
        if len(taken) == top_k:
            break
        taken.append(cand)
    taken.sort(key=lambda c: c.rank)
    for i, cand in enumerate(taken):
        cand.rank = i + 1
    return taken


def run_search(
    request: SearchRequest,
    bundle: DatasetBundle,
    spec: ProblemSpec,
    eval_workers: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list[CandidateModel]:
    """Execute one search synchronously; deterministic given the request."""
    if spec.dataset_id != bundle.id:
        raise SpecInvalidError(["specBundleMismatch"])
    split = make_split(bundle, spec, request.seed, request.holdout_fraction)
    grid = enumerate_grid(spec, bundle.meta.season)
    selected = grid[: request.budget]
    total = len(selected)
    if progress:
        progress(0, total)
    folds = _cv_folds(bundle, spec, split.train_row_ids, request.seed + 1)

    results: dict[int, tuple] = {}
    errors: dict[str, str] = {}
    done_count = 0
    lock = threading.Lock()

    def evaluate(index: int, descriptor: PipelineDescriptor):
        nonlocal done_count
        try:
            outcome = _score_config(descriptor, bundle, spec, folds, split, request.seed)
        except WorkbenchError as exc:
            outcome = exc
        with lock:
            results[index] = (descriptor, outcome)
            done_count += 1
            if progress:
                progress(done_count, total)

    if eval_workers > 1:
        with ThreadPoolExecutor(max_workers=eval_workers) as pool:
            futures = [
                pool.submit(evaluate, i, d) for i, d in enumerate(selected)
            ]
            for f in futures:
                f.result()
    else:
        for i, d in enumerate(selected):
            evaluate(i, d)

    candidates: list[CandidateModel] = []
    for index in sorted(results):  # reduction ordered by configuration index
        descriptor, outcome = results[index]
        if isinstance(outcome, WorkbenchError):
            errors[descriptor.family] = outcome.message
            continue
        cv_score, model, report = outcome
        cand_id = _candidate_id(spec, request.seed, descriptor)
        report.candidate_id = cand_id
        candidates.append(
            CandidateModel(
                id=cand_id,
                descriptor=descriptor,
                cv_score=cv_score,
                holdout_report=report,
                rank=0,
                model=model,
                split=split,
            )
        )
    if not candidates:
        raise SearchFailedError(errors)

    ordered = rank_candidates(candidates, spec.metric)
    return _apply_diversity_cap(ordered, request.top_k)


class SearchRegistry:
    """Asynchronous search execution with pollable progress.

    Searches run on a bounded worker pool; submitting the same request twice
    returns the same (content-derived) search id.  Mutating a search record
    never blocks status reads for other searches.
    """

    def __init__(self, max_workers: int = 2, eval_workers: int = 1):
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._eval_workers = eval_workers
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}

    def search_id(self, request: SearchRequest) -> str:
        return short_hash(request.to_doc(), "srch")

    def submit(
        self,
        request: SearchRequest,
        bundle: DatasetBundle,
        spec: ProblemSpec,
        on_done=None,
    ) -> str:
        search_id = self.search_id(request)
        with self._lock:
            if search_id in self._records:
                return search_id
            self._records[search_id] = {
                "request": request,
                "status": SearchStatus("queued", 0, 0),
                "candidates": None,
                "future": None,
                "failure": None,
            }

        def progress(done: int, total: int):
            with self._lock:
                status = self._records[search_id]["status"]
                status.state = "running"
                status.evaluated = done
                status.total = total

        def run():
            try:
                found = run_search(
                    request, bundle, spec, self._eval_workers, progress
                )
                # persistence hooks finish before the search reads as done,
                # so a "done" status implies results are fully available
                if on_done is not None:
                    on_done(search_id, request, found)
            except WorkbenchError as exc:
                with self._lock:
                    record = self._records[search_id]
                    record["status"].state = "failed"
                    record["status"].error = exc.to_doc()
                    record["failure"] = exc
                return
            with self._lock:
                record = self._records[search_id]
                record["candidates"] = found
                record["status"].state = "done"

        future = self._pool.submit(run)
        with self._lock:
            self._records[search_id]["future"] = future
        return search_id

    def _record(self, search_id: str) -> dict:
        with self._lock:
            if search_id not in self._records:
                raise NotFoundError("search", search_id)
            return self._records[search_id]

    def status(self, search_id: str) -> SearchStatus:
        record = self._record(search_id)
        with self._lock:
            status = record["status"]
            return SearchStatus(status.state, status.evaluated, status.total, status.error)

    def wait(self, search_id: str, timeout: Optional[float] = None) -> None:
        future: Optional[Future] = self._record(search_id)["future"]
        if future is not None:
            future.result(timeout=timeout)

    def candidates(self, search_id: str) -> list[CandidateModel]:
        record = self._record(search_id)
        with self._lock:
            if record["failure"] is not None:
                raise record["failure"]
            if record["candidates"] is None:
                raise NotFoundError("searchResults", search_id)
            return record["candidates"]

    def request_of(self, search_id: str) -> SearchRequest:
        return self._record(search_id)["request"]

    def restore(self, search_id: str, request: SearchRequest, candidates) -> None:
        """Re-register a completed search loaded from a persisted snapshot."""
        with self._lock:
            self._records[search_id] = {
                "request": request,
                "status": SearchStatus("done", len(candidates), len(candidates)),
                "candidates": candidates,
                "future": None,
                "failure": None,
            }
