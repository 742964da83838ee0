"""Versioned, checksummed JSON artifacts.

Every persisted model (MDP, policy, scenario bundle) is wrapped in the same
envelope: a format tag, a schema version, and a sha256 checksum over the
canonical serialization of the payload.  Writing the same object twice
produces byte-identical files, and any corruption or version drift fails
loudly at load time.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any


class ArtifactError(ValueError):
    """The artifact file is missing, corrupt, or of an unsupported version."""


def canonical_json(payload: Any) -> str:
    """Deterministic serialization: sorted keys, no whitespace, no NaN."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=False)


def checksum(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def write_artifact(path: str | Path, kind: str, payload: Any, version: int) -> None:
    envelope = {
        "format": kind,
        "version": version,
        "checksum": checksum(payload),
        "payload": payload,
    }
    Path(path).write_text(
        json.dumps(envelope, sort_keys=True, indent=2, ensure_ascii=False,
                   allow_nan=False) + "\n",
        encoding="utf-8",
    )


def read_artifact(path: str | Path, kind: str, version: int) -> Any:
    path = Path(path)
    if not path.exists():
        raise ArtifactError(f"artifact not found: {path}")
    try:
        envelope = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"artifact {path} is not valid JSON: {exc}") from exc
    if not isinstance(envelope, dict) or envelope.get("format") != kind:
        raise ArtifactError(
            f"artifact {path} is not a {kind!r} file "
            f"(found format {envelope.get('format') if isinstance(envelope, dict) else None!r})")
    found_version = envelope.get("version")
    if found_version != version:
        raise ArtifactError(
            f"artifact {path} has version {found_version}, expected {version}")
    payload = envelope.get("payload")
    expected = envelope.get("checksum")
    actual = checksum(payload)
    if expected != actual:
        raise ArtifactError(
            f"artifact {path} failed its checksum (stored {expected}, computed {actual})")
    return payload
