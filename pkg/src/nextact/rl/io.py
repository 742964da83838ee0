"""Persist trained policies (with their action-value tables) as artifacts."""
from __future__ import annotations

from pathlib import Path

from ..artifacts import read_artifact, write_artifact
from .policy import Policy, QTable

POLICY_FORMAT = "nextact-policy"
POLICY_VERSION = 1


def save_policy_artifact(path: str | Path, policy: Policy, q: QTable | None = None,
                         meta: dict | None = None) -> None:
    payload = {
        "policy": policy.to_dict(),
        "q": q.to_dict() if q is not None else None,
        "meta": dict(sorted((meta or {}).items())),
    }
    write_artifact(path, POLICY_FORMAT, payload, POLICY_VERSION)


def load_policy_artifact(path: str | Path) -> tuple[Policy, QTable | None, dict]:
    payload = read_artifact(path, POLICY_FORMAT, POLICY_VERSION)
    policy = Policy.from_dict(payload["policy"])
    q = QTable.from_dict(payload["q"]) if payload.get("q") else None
    return policy, q, dict(payload.get("meta", {}))
