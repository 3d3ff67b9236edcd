"""emabench: an exploratory model analysis workbench.

Given a schema-annotated dataset, enumerate candidate modeling problems,
run a bounded deterministic model search per chosen problem, inspect
prediction-level evaluation artifacts, and export selected models with
full provenance.
"""
from .dataset import DatasetBundle, ingest, rows_matching, serialize_bundle, summarize
from .evaluation import build_report, compute_metric, make_split
from .learners import FittedModel, PipelineDescriptor, families, fit, predict
from .problemgen import (
    ProblemSpec,
    TaskType,
    create_spec,
    enumerate_specs,
    refine_spec,
)
from .search import SearchRequest, rank_candidates, run_search
from .session import WorkflowStep, advance, load_artifact
from .workbench import Workbench

__version__ = "0.1.0"

__all__ = [
    "DatasetBundle",
    "FittedModel",
    "PipelineDescriptor",
    "ProblemSpec",
    "SearchRequest",
    "TaskType",
    "Workbench",
    "WorkflowStep",
    "advance",
    "build_report",
    "compute_metric",
    "create_spec",
    "enumerate_specs",
    "families",
    "fit",
    "ingest",
    "load_artifact",
    "make_split",
    "predict",
    "rank_candidates",
    "refine_spec",
    "rows_matching",
    "run_search",
    "serialize_bundle",
    "summarize",
]
