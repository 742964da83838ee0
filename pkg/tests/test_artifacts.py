"""Checksummed artifact envelope: determinism, round-trips, failure modes."""
from __future__ import annotations

import json

import pytest

from nextact.artifacts import (
    ArtifactError,
    canonical_json,
    checksum,
    read_artifact,
    write_artifact,
)


class TestCanonicalForm:
    def test_key_order_is_irrelevant(self):
        assert canonical_json({"b": 1, "a": 2}) == canonical_json({"a": 2, "b": 1})

    def test_no_whitespace(self):
        assert canonical_json({"a": [1, 2]}) == '{"a":[1,2]}'

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            canonical_json({"x": float("nan")})

    def test_checksum_is_stable(self):
        payload = {"numbers": [1, 2.5], "name": "x"}
        assert checksum(payload) == checksum(json.loads(json.dumps(payload)))
        assert len(checksum(payload)) == 64

    def test_checksum_changes_with_content(self):
        assert checksum({"a": 1}) != checksum({"a": 2})


class TestEnvelope:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "thing.json"
        payload = {"values": [1, 2, 3], "tag": "demo"}
        write_artifact(path, "demo-kind", payload, 1)
        assert read_artifact(path, "demo-kind", 1) == payload

    def test_writing_twice_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        payload = {"z": 1, "a": {"nested": [True, None]}}
        write_artifact(a, "demo-kind", payload, 1)
        write_artifact(b, "demo-kind", payload, 1)
        assert a.read_bytes() == b.read_bytes()

    def test_wrong_kind_rejected(self, tmp_path):
        path = tmp_path / "thing.json"
        write_artifact(path, "demo-kind", {}, 1)
        with pytest.raises(ArtifactError, match="demo-kind"):
            read_artifact(path, "other-kind", 1)

    def test_wrong_version_rejected(self, tmp_path):
        path = tmp_path / "thing.json"
        write_artifact(path, "demo-kind", {}, 1)
        with pytest.raises(ArtifactError, match="version"):
            read_artifact(path, "demo-kind", 2)

    def test_tampered_payload_rejected(self, tmp_path):
        path = tmp_path / "thing.json"
        write_artifact(path, "demo-kind", {"value": 1}, 1)
        path.write_text(path.read_text().replace('"value": 1', '"value": 2'))
        with pytest.raises(ArtifactError, match="checksum"):
            read_artifact(path, "demo-kind", 1)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "thing.json"
        path.write_text("{truncated")
        with pytest.raises(ArtifactError, match="JSON"):
            read_artifact(path, "demo-kind", 1)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ArtifactError, match="not found"):
            read_artifact(tmp_path / "gone.json", "demo-kind", 1)
