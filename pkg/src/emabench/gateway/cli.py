"""Command-line driver for the whole workflow.

Subcommands: ingest, summarize, problems, search, report, select, export,
serve (plus `sample` to materialize the built-in fixtures).  Every
subcommand takes ``--json`` for machine-readable output.  Configuration
precedence is flags > environment variables > defaults; the environment
variables are EMABENCH_DATA_DIR, EMABENCH_EXPORT_DIR, EMABENCH_PORT and
EMABENCH_WORKERS.

The CLI drives a real session per dataset (id ``cli-<datasetId>``) through
the legal workflow transitions, so select/export enforce the same state
machine as the API.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..errors import WorkbenchError
from ..sampledata import GENERATORS
from ..session import WorkflowStep
from ..workbench import Workbench


def _env(name: str, default):
    return os.environ.get(name, default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emabench",
        description="Exploratory model analysis workbench",
    )
    parser.add_argument(
        "--data-dir",
        default=_env("EMABENCH_DATA_DIR", "./emabench-data"),
        help="state directory (datasets, specs, searches, sessions)",
    )
    parser.add_argument(
        "--export-dir",
        default=_env("EMABENCH_EXPORT_DIR", "./emabench-exports"),
        help="directory for exported model artifacts",
    )
    parser.add_argument(
        "--json", action="store_true", help="machine-readable JSON output"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a CSV file with its schema document")
    p.add_argument("csv", help="path to the data file")
    p.add_argument("schema", help="path to the sidecar schema JSON")

    p = sub.add_parser("summarize", help="per-column summary of a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--out", help="write the summary document to this path")

    p = sub.add_parser("problems", help="enumerate problem specifications")
    p.add_argument("--dataset", required=True)

    p = sub.add_parser("search", help="run a bounded model search for a spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--budget", type=int, default=16)
    p.add_argument("--top-k", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--holdout-fraction", type=float, default=0.25)

    p = sub.add_parser("report", help="prediction-level report for a candidate")
    p.add_argument("--candidate", required=True)

    p = sub.add_parser("select", help="record preference ranks for candidates")
    p.add_argument("--search", required=True)
    p.add_argument("--candidates", required=True, help="comma-separated candidate ids")
    p.add_argument("--ranks", required=True, help="comma-separated user ranks")

    p = sub.add_parser("export", help="export the selected models with provenance")
    p.add_argument("--dataset", required=True)

    p = sub.add_parser("serve", help="run the HTTP gateway")
    p.add_argument("--port", type=int, default=int(_env("EMABENCH_PORT", "8765")))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--workers", type=int, default=int(_env("EMABENCH_WORKERS", "2")))

    p = sub.add_parser("sample", help="write a built-in sample dataset to disk")
    p.add_argument("name", choices=sorted(GENERATORS))
    p.add_argument("--out", default=".", help="output directory")

    return parser


def _session_id(dataset_id: str) -> str:
    return f"cli-{dataset_id}"


def _ensure_session(bench: Workbench, dataset_id: str):
    sid = _session_id(dataset_id)
    try:
        return bench.session(sid)
    except WorkbenchError:
        return bench.sessions.create(sid, dataset_id)


def _to_step3(bench: Workbench, dataset_id: str, spec_id: str) -> None:
    """Walk the session to problem specification along legal edges only."""
    sid = _session_id(dataset_id)
    state = _ensure_session(bench, dataset_id)
    if state.step is WorkflowStep.dataExploration:
        state = bench.advance_session(sid, "exploreProblems")
    if state.step is WorkflowStep.problemExploration:
        state = bench.advance_session(sid, "specifyProblem", spec_id=spec_id)
    elif state.step in (
        WorkflowStep.modelExploration,
        WorkflowStep.modelSelection,
        WorkflowStep.exportModels,
    ):
        state = bench.advance_session(sid, "retryProblem")
    if state.step is WorkflowStep.problemSpecification and state.active_spec_id != spec_id:
        bench.set_active_spec(sid, spec_id)


def _emit(args, machine_doc: dict, human_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(machine_doc, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _cmd_ingest(bench: Workbench, args) -> dict:
    csv_text = Path(args.csv).read_text(encoding="utf-8")
    schema = json.loads(Path(args.schema).read_text(encoding="utf-8"))
    bundle = bench.ingest(csv_text, schema)
    _ensure_session(bench, bundle.id)
    doc = {
        "datasetId": bundle.id,
        "rowCount": bundle.row_count,
        "resourceShape": bundle.resource_shape,
    }
    _emit(
        args,
        doc,
        [f"ingested {bundle.meta.name or args.csv}: {bundle.row_count} rows",
         f"dataset id: {bundle.id}"],
    )
    return doc


def _cmd_summarize(bench: Workbench, args) -> dict:
    doc = bench.summary(args.dataset, args.bins).to_doc()
    if args.out:
        Path(args.out).write_text(
            json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8"
        )
    lines = [f"rows: {doc['rowCount']}"]
    for name, col in doc["columns"].items():
        if "histogram" in col:
            lines.append(f"{name} [numeric] counts={col['histogram']['counts']}")
        elif "frequencies" in col:
            freq = ", ".join(
                f"{f['label']}:{f['count']}" for f in col["frequencies"][:8]
            )
            lines.append(f"{name} [categorical] {freq}")
        else:
            lines.append(f"{name} [{col['kind']}]")
    _emit(args, doc, lines)
    return doc


def _cmd_problems(bench: Workbench, args) -> dict:
    specs = bench.problems(args.dataset)
    sid = _session_id(args.dataset)
    try:
        if bench.session(sid).step is WorkflowStep.dataExploration:
            bench.advance_session(sid, "exploreProblems")
    except WorkbenchError:
        pass
    doc = {"specs": [s.to_doc() for s in specs]}
    lines = [f"{len(specs)} problem specifications:"]
    lines += [
        f"  {s.id}  {s.task.value:<22} target={s.target:<14} metric={s.metric}"
        for s in specs
    ]
    _emit(args, doc, lines)
    return doc


def _cmd_search(bench: Workbench, args) -> dict:
    spec = bench.spec(args.spec)
    _to_step3(bench, spec.dataset_id, spec.id)
    sid = _session_id(spec.dataset_id)
    search_id = bench.submit_search(
        args.spec,
        budget=args.budget,
        top_k=args.top_k,
        seed=args.seed,
        holdout_fraction=args.holdout_fraction,
    )
    bench.advance_session(sid, "startSearch", search_id=search_id)
    bench.wait_search(search_id)
    status = bench.search_status(search_id)
    if status.state == "failed":
        bench.candidates(search_id)  # raises the stored failure
    bench.advance_session(sid, "exploreModels")
    candidates = bench.candidates(search_id)
    doc = {
        "searchId": search_id,
        "candidates": [c.summary_doc() for c in candidates],
    }
    lines = [f"search {search_id}: {len(candidates)} ranked candidates"]
    for c in candidates:
        lines.append(
            f"  #{c.rank} {c.id}  {c.descriptor.family:<20} "
            f"{spec.metric}={c.holdout_report.scores[spec.metric]:.6g} "
            f"hp={json.dumps(c.descriptor.hyperparameters, sort_keys=True)}"
        )
    _emit(args, doc, lines)
    return doc


def _cmd_report(bench: Workbench, args) -> dict:
    cand = bench.candidate(args.candidate)
    doc = cand.holdout_report.to_doc()
    lines = [f"candidate {cand.id} ({cand.descriptor.family})"]
    lines.append("scores: " + json.dumps(doc["scores"], sort_keys=True))
    if doc["confusion"]:
        lines.append("confusion labels: " + ", ".join(map(str, doc["confusion"]["labels"])))
        for label, row in zip(doc["confusion"]["labels"], doc["confusion"]["cells"]):
            lines.append(f"  {label:<12} {row}")
    _emit(args, doc, lines)
    return doc


def _cmd_select(bench: Workbench, args) -> dict:
    candidates = [c for c in args.candidates.split(",") if c]
    ranks = [int(r) for r in args.ranks.split(",") if r]
    bench.search_status(args.search)  # loads a persisted search if needed
    spec_id = bench.registry.request_of(args.search).spec_id
    dataset_id = bench.spec(spec_id).dataset_id
    sid = _session_id(dataset_id)
    state = bench.session(sid)
    if state.step is WorkflowStep.modelExploration:
        bench.advance_session(sid, "selectModels")
    state = bench.select_candidates(sid, candidates, ranks)
    doc = state.to_doc()
    _emit(
        args,
        doc,
        ["selections: " + ", ".join(f"{c}#{r}" for c, r in state.selections)],
    )
    return doc


def _cmd_export(bench: Workbench, args) -> dict:
    sid = _session_id(args.dataset)
    state = bench.session(sid)
    if state.step is WorkflowStep.modelSelection:
        bench.advance_session(sid, "exportModels")
    artifacts = bench.export_session(sid)
    doc = {
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
    lines = [f"exported {len(artifacts)} model(s):"]
    for a in artifacts:
        lines.append(f"  rank {a.user_rank}: {a.model_path}")
    _emit(args, doc, lines)
    return doc


def _cmd_sample(args) -> dict:
    csv_text, schema = GENERATORS[args.name]()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{args.name}.csv"
    schema_path = out / f"{args.name}.schema.json"
    csv_path.write_text(csv_text, encoding="utf-8")
    schema_path.write_text(
        json.dumps(schema, indent=2, sort_keys=True), encoding="utf-8"
    )
    doc = {"csv": str(csv_path), "schema": str(schema_path)}
    _emit(args, doc, [f"wrote {csv_path} and {schema_path}"])
    return doc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sample":
            _cmd_sample(args)
            return 0
        if args.command == "serve":
            from .api import serve

            serve(
                {
                    "port": args.port,
                    "host": args.host,
                    "dataDir": args.data_dir,
                    "exportDir": args.export_dir,
                    "workers": args.workers,
                }
            )
            return 0
        bench = Workbench(data_dir=args.data_dir, export_dir=args.export_dir)
        handler = {
            "ingest": _cmd_ingest,
            "summarize": _cmd_summarize,
            "problems": _cmd_problems,
            "search": _cmd_search,
            "report": _cmd_report,
            "select": _cmd_select,
            "export": _cmd_export,
        }[args.command]
        handler(bench, args)
        return 0
    except WorkbenchError as exc:
        print(json.dumps({"error": exc.to_doc()}, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
