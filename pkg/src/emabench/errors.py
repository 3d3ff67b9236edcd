"""Error hierarchy shared by every module.

Each error carries a short machine code from a closed catalog so the
gateway can map failures onto wire responses without string matching.
The full catalog lives in ``CODES`` and is contract-tested against
``docs/api_reference.md``.
"""
from __future__ import annotations

from typing import Any, Optional


class WorkbenchError(Exception):
    """Base error: machine code + human message + optional details map."""

    code = "INTERNAL"

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_doc(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


class SchemaMismatchError(WorkbenchError):
    code = "SCHEMA_MISMATCH"


class DuplicateColumnError(WorkbenchError):
    code = "DUPLICATE_COLUMN"


class EmptyDatasetError(WorkbenchError):
    code = "EMPTY_DATASET"


class ValueParseError(WorkbenchError):
    code = "VALUE_PARSE"

    def __init__(self, message: str, row_id: int, column: str):
        super().__init__(message, {"rowId": row_id, "column": column})
        self.row_id = row_id
        self.column = column


class UnknownColumnError(WorkbenchError):
    code = "UNKNOWN_COLUMN"


class BadSelectorError(WorkbenchError):
    code = "BAD_SELECTOR"


class SpecInvalidError(WorkbenchError):
    """Problem-spec invariant violations, each named in ``violations``."""

    code = "SPEC_INVALID"

    def __init__(self, violations: list[str]):
        super().__init__(
            "problem spec invalid: " + ", ".join(violations),
            {"violations": list(violations)},
        )
        self.violations = list(violations)


class NotFoundError(WorkbenchError):
    code = "NOT_FOUND"

    def __init__(self, kind: str, ident: str):
        super().__init__(f"unknown {kind}: {ident}", {"kind": kind, "id": ident})


class SplitTooSmallError(WorkbenchError):
    code = "SPLIT_TOO_SMALL"


class MetricInputError(WorkbenchError):
    code = "METRIC_INPUT"


class MissingFeatureError(WorkbenchError):
    code = "MISSING_FEATURE"


class DegenerateTrainingError(WorkbenchError):
    code = "DEGENERATE_TRAINING"


class SingularSystemError(WorkbenchError):
    code = "SINGULAR_SYSTEM"


class SearchFailedError(WorkbenchError):
    code = "SEARCH_FAILED"

    def __init__(self, family_errors: dict[str, str]):
        super().__init__(
            "every configuration failed", {"familyErrors": dict(family_errors)}
        )
        self.family_errors = dict(family_errors)


class IllegalTransitionError(WorkbenchError):
    code = "WORKFLOW_ILLEGAL_TRANSITION"

    def __init__(self, step: str, event: str):
        super().__init__(
            f"event {event!r} is not legal from step {step}",
            {"step": step, "event": event},
        )


class DuplicateRankError(WorkbenchError):
    code = "DUPLICATE_RANK"


class EmptySelectionError(WorkbenchError):
    code = "EMPTY_SELECTION"


class ArtifactCorruptError(WorkbenchError):
    code = "ARTIFACT_CORRUPT"


class ArtifactVersionError(WorkbenchError):
    code = "ARTIFACT_VERSION"

    def __init__(self, found: int, supported: int):
        super().__init__(
            f"artifact format version {found} not supported (reader supports {supported})",
            {"found": found, "supported": supported},
        )


class BadRequestError(WorkbenchError):
    code = "BAD_REQUEST"


#: Closed catalog of error codes exposed on the wire.
CODES = (
    "BAD_REQUEST",
    "SCHEMA_MISMATCH",
    "DUPLICATE_COLUMN",
    "EMPTY_DATASET",
    "VALUE_PARSE",
    "UNKNOWN_COLUMN",
    "BAD_SELECTOR",
    "SPEC_INVALID",
    "NOT_FOUND",
    "SPLIT_TOO_SMALL",
    "METRIC_INPUT",
    "MISSING_FEATURE",
    "DEGENERATE_TRAINING",
    "SINGULAR_SYSTEM",
    "SEARCH_FAILED",
    "WORKFLOW_ILLEGAL_TRANSITION",
    "DUPLICATE_RANK",
    "EMPTY_SELECTION",
    "ARTIFACT_CORRUPT",
    "ARTIFACT_VERSION",
    "INTERNAL",
)
