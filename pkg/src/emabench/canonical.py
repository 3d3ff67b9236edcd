"""Canonical serialization: stable hashes, lossless floats, artifact container.

Two byte-level contracts live here:

* ``canonical_json`` — sorted keys, compact separators, ASCII only.  Identical
  in-memory values always produce identical bytes, so content hashes are
  stable across runs.
* the artifact container — a self-describing JSON document with an embedded
  format version and a SHA-256 content checksum.  Floats inside the payload
  are stored as hexadecimal float literals (``float.hex()``), which round-trip
  bit-exactly on every platform.
"""
from __future__ import annotations

import hashlib
import json
import math
from typing import Any

from .errors import ArtifactCorruptError, ArtifactVersionError

FORMAT_VERSION = 1

_FLOAT_TAG = "~f"


def normalize(obj: Any) -> Any:
    """Coerce numpy scalars/arrays and tuples into plain JSON-able Python."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return obj
    # numpy scalars and arrays, without importing numpy here
    item = getattr(obj, "item", None)
    if callable(item) and not hasattr(obj, "__len__"):
        return normalize(item())
    tolist = getattr(obj, "tolist", None)
    if callable(tolist):
        return normalize(tolist())
    raise TypeError(f"cannot canonicalize value of type {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    return json.dumps(
        normalize(obj),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
        allow_nan=False,
    )


def canonical_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def short_hash(obj: Any, prefix: str) -> str:
    """Deterministic 12-hex-digit content id with a readable prefix."""
    return f"{prefix}-{sha256_hex(canonical_bytes(obj))[:12]}"


def hexify(obj: Any) -> Any:
    """Tag every float as ``{"~f": float.hex()}`` for lossless round trips."""
    obj = normalize(obj)

    def walk(v: Any) -> Any:
        if isinstance(v, bool) or v is None or isinstance(v, (str, int)):
            return v
        if isinstance(v, float):
            if not math.isfinite(v):
                raise ValueError(f"non-finite float in artifact payload: {v}")
            return {_FLOAT_TAG: v.hex()}
        if isinstance(v, list):
            return [walk(x) for x in v]
        if isinstance(v, dict):
            return {k: walk(x) for k, x in v.items()}
        raise TypeError(f"cannot hexify value of type {type(v).__name__}")

    return walk(obj)


def dehexify(obj: Any) -> Any:
    if isinstance(obj, dict):
        if set(obj.keys()) == {_FLOAT_TAG}:
            return float.fromhex(obj[_FLOAT_TAG])
        return {k: dehexify(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [dehexify(v) for v in obj]
    return obj


def dump_artifact(payload: dict) -> bytes:
    """Serialize a payload into the versioned, checksummed container."""
    body = {"formatVersion": FORMAT_VERSION, "payload": hexify(payload)}
    checksum = sha256_hex(canonical_bytes(body))
    body["checksum"] = checksum
    return canonical_bytes(body) + b"\n"


def load_artifact_bytes(data: bytes) -> dict:
    """Parse and verify an artifact container; returns the decoded payload."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArtifactCorruptError(f"artifact is not parseable: {exc}") from exc
    if not isinstance(doc, dict) or "formatVersion" not in doc:
        raise ArtifactCorruptError("artifact missing formatVersion")
    version = doc["formatVersion"]
    if version != FORMAT_VERSION:
        raise ArtifactVersionError(found=version, supported=FORMAT_VERSION)
    stated = doc.get("checksum")
    body = {"formatVersion": doc["formatVersion"], "payload": doc.get("payload")}
    actual = sha256_hex(canonical_bytes(body))
    if stated != actual:
        raise ArtifactCorruptError(
            "artifact checksum mismatch",
            {"stated": stated, "actual": actual},
        )
    return dehexify(doc["payload"])
