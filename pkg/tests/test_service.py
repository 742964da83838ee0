"""State resolution, ranking, and the HTTP recommendation service."""
from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

import helpers
from nextact.artifacts import checksum
from nextact.log.model import Event
from nextact.mdp.build import build_mdp
from nextact.mdp.io import save_mdp
from nextact.mdp.model import START_STATE, State
from nextact.rl.io import save_policy_artifact
from nextact.rl.montecarlo import policy_iteration
from nextact.rl.policy import Policy, QTable, customary_policy
from nextact.service.app import create_app
from nextact.service.bundle import BundleError, load_bundle
from nextact.service.resolve import (
    ResolutionError,
    annotate_prefix,
    rank_actions,
    recommend,
    resolve_state,
)

D0 = "2021-03-01T09:00:00Z"


def _iso(day_offset: int) -> str:
    from datetime import timedelta

    from helpers import ts
    return (ts(2021, 3, 1) + timedelta(days=day_offset)).isoformat()


def fines_events(*steps):
    """Build request events: a fine for 40 created at D0, then (activity, day)."""
    events = [{"activity": "Create fine", "timestamp": D0,
               "payload": {"amount": 40.0}}]
    for activity, day in steps:
        events.append({"activity": activity, "timestamp": _iso(day)})
    return events


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory, fines_spec, fines_log_big):
    root = tmp_path_factory.mktemp("service")
    mdp = build_mdp(fines_log_big, fines_spec)
    result = policy_iteration(mdp, episodes_per_iter=2000, max_iters=10, seed=0)
    save_mdp(mdp, root / "mdp.json")
    save_policy_artifact(root / "policy.json", result.policy, q=result.q,
                         meta={"seed": 0, "episodes_per_iter": 2000})
    return root


@pytest.fixture(scope="module")
def client(artifacts):
    app = create_app(artifacts / "mdp.json", artifacts / "policy.json", "fines")
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def fines_mdp(fines_spec, fines_log_big):
    return build_mdp(fines_log_big, fines_spec)


class TestResolve:
    def test_empty_execution_resolves_to_the_start(self, fines_mdp, fines_spec):
        resolved = resolve_state([], {}, fines_mdp, fines_spec)
        assert resolved.state == START_STATE
        assert not resolved.fallback_used
        assert resolved.annotated is None

    def test_annotate_prefix_of_nothing_is_none(self, fines_spec):
        assert annotate_prefix([], {}, fines_spec) is None

    def test_exact_state_match(self, fines_mdp, fines_spec):
        from helpers import ts
        events = [Event("Create fine", ts(2021, 3, 1), {"amount": 40.0}),
                  Event("Send fine", ts(2021, 3, 11))]
        resolved = resolve_state(events, {}, fines_mdp, fines_spec)
        assert resolved.state == State("Send fine", (0,), ("low",))
        assert not resolved.fallback_used

    def test_unseen_bucket_relaxes_history_features(self, fines_mdp, fines_spec):
        from datetime import timedelta
        from helpers import ts
        events = [Event("Create fine", ts(2021, 3, 1), {"amount": 40.0}),
                  Event("Send fine", ts(2021, 3, 1) + timedelta(days=70))]
        resolved = resolve_state(events, {}, fines_mdp, fines_spec)
        assert resolved.fallback_used
        assert resolved.state.la == "Send fine"
        assert resolved.state.ef == ("low",)

    def test_most_recently_changed_feature_relaxes_first(self, loans_spec,
                                                         loans_log_big):
        from helpers import ts
        spec = loans_spec.calibrate(loans_log_big)
        mdp = build_mdp(loans_log_big, spec, lam=0.0)
        # a second offer was never observed; dropping the offer counter (the
        # last feature to change) lands on the single-offer twin state
        events = [Event("Submit application", ts(2021, 3, 1)),
                  Event("Create offer", ts(2021, 3, 2)),
                  Event("Create offer", ts(2021, 3, 3))]
        resolved = resolve_state(events, {"amount": 10000.0}, mdp, spec)
        assert resolved.fallback_used
        assert resolved.state.la == "Create offer"
        offer_index = spec.hf_names.index("offer#")
        assert resolved.state.hf[offer_index] == 1
        assert resolved.state.ef == ("medium",)

    def test_unknown_last_activity_is_an_error(self, fines_mdp, fines_spec):
        from datetime import timedelta
        from helpers import ts
        events = [Event("Create fine", ts(2021, 3, 1), {"amount": 40.0}),
                  Event("Appeal to judge", ts(2021, 3, 1) + timedelta(days=100))]
        with pytest.raises(ResolutionError):
            resolve_state(events, {}, fines_mdp, fines_spec)

    def test_rank_puts_the_policy_choice_first(self):
        mdp = helpers.branch_mdp()
        policy = Policy(kind="optimal", mapping={State("A"): "risky"})
        q = QTable()
        q.update(State("A"), "sure", 10.0)
        q.update(State("A"), "risky", 3.0)
        ranked = rank_actions(State("A"), mdp, policy, q)
        assert [r.action for r in ranked] == ["risky", "sure"]
        assert ranked[0].q_value == 3.0
        assert ranked[1].support == 5

    def test_unestimated_actions_rank_last(self):
        mdp = helpers.branch_mdp()
        policy = Policy(kind="optimal", mapping={State("A"): "sure"})
        q = QTable()
        q.update(State("A"), "sure", 10.0)
        ranked = rank_actions(State("A"), mdp, policy, q)
        assert [r.action for r in ranked] == ["sure", "risky"]
        assert ranked[1].q_value is None

    def test_kpi_none_when_durations_unknown(self, loans_spec, loans_log_big):
        from helpers import ts
        calibrated = loans_spec.calibrate(loans_log_big)
        mdp = build_mdp(loans_log_big, calibrated, lam=0.0)
        events = [Event("Submit application", ts(2021, 3, 1)),
                  Event("Create offer", ts(2021, 3, 2))]
        result = recommend(events, {"amount": 10000.0}, mdp, loans_spec,
                           customary_policy(mdp), QTable())
        assert result.kpi_so_far is None


class TestEndpoints:
    def test_health(self, client):
        body = client.get("/v1/health").json()
        assert body["status"] == "ok"
        assert body["scenario_id"] == "fines"
        assert len(body["policy_fingerprint"]) == 64

    def test_meta_fingerprints_match_artifacts(self, client, fines_mdp):
        body = client.get("/v1/policy/meta").json()
        assert body["scenario_id"] == "fines"
        assert body["mdp"]["fingerprint"] == checksum(fines_mdp.to_dict())
        assert body["mdp"]["n_states"] == 19
        assert body["policy"]["kind"] == "optimal"
        assert body["training"]["seed"] == 0

    def test_recommend_at_the_start(self, client):
        body = client.post("/v1/recommend", json={
            "scenario_id": "fines", "events": []}).json()
        assert body["resolved_state"]["la"] == "<start>"
        assert body["fallback_used"] is False
        assert body["terminal"] is False
        assert body["kpi_so_far"] == 0.0
        assert body["ranked"][0]["action"] == "Create fine-0"
        assert body["ranked"][0]["support"] == 1000
        estimated = [r["q_value"] for r in body["ranked"] if r["q_value"] is not None]
        assert estimated[1:] == sorted(estimated[1:], reverse=True)

    def test_recommend_mid_execution(self, client):
        body = client.post("/v1/recommend", json={
            "scenario_id": "fines",
            "events": fines_events(("Send fine", 10))}).json()
        assert body["resolved_state"]["la"] == "Send fine"
        assert body["resolved_state"]["hf"] == [0]
        assert body["resolved_state"]["ef"] == ["low"]
        assert body["fallback_used"] is False
        assert body["ranked"][0]["action"] == "Add penalty-1"

    def test_recommend_on_a_finished_execution(self, client):
        body = client.post("/v1/recommend", json={
            "scenario_id": "fines",
            "events": fines_events(("Send fine", 10), ("Payment", 25))}).json()
        assert body["terminal"] is True
        assert body["ranked"] == []
        assert body["kpi_so_far"] == 3.0

    def test_recommend_falls_back_on_unseen_buckets(self, client):
        events = fines_events()
        events.append({"activity": "Send fine", "timestamp": _iso(70)})
        body = client.post("/v1/recommend", json={
            "scenario_id": "fines", "events": events}).json()
        assert body["fallback_used"] is True
        assert body["resolved_state"]["la"] == "Send fine"

    def test_wrong_scenario_is_conflict(self, client):
        response = client.post("/v1/recommend", json={
            "scenario_id": "loans", "events": []})
        assert response.status_code == 409
        assert "fines" in response.json()["detail"]

    def test_unknown_activity_is_unprocessable(self, client):
        response = client.post("/v1/recommend", json={
            "scenario_id": "fines",
            "events": [{"activity": "Dance", "timestamp": D0}]})
        assert response.status_code == 422

    def test_empty_activity_fails_validation(self, client):
        response = client.post("/v1/recommend", json={
            "scenario_id": "fines",
            "events": [{"activity": "", "timestamp": D0}]})
        assert response.status_code == 422

    def test_unresolvable_state_is_unprocessable(self, client):
        events = fines_events()
        events.append({"activity": "Appeal to judge", "timestamp": _iso(100)})
        response = client.post("/v1/recommend", json={
            "scenario_id": "fines", "events": events})
        assert response.status_code == 422


class TestWhatIf:
    def test_projection_fields(self, client):
        body = client.post("/v1/whatif", json={
            "scenario_id": "fines", "events": fines_events(),
            "action": "Send fine-0"}).json()
        assert body["action"] == "Send fine-0"
        assert body["n_cases"] == 2000
        assert body["seed"] == 0
        assert isinstance(body["projected_kpi"], float)
        assert body["resolved_state"]["la"] == "Create fine"

    def test_projection_is_pure(self, client):
        request = {"scenario_id": "fines", "events": fines_events(),
                   "action": "Send fine-0"}
        first = client.post("/v1/whatif", json=request).json()
        second = client.post("/v1/whatif", json=request).json()
        assert first == second

    def test_policy_action_beats_the_alternative(self, client):
        request = {"scenario_id": "fines", "events": fines_events(),
                   "n_cases": 20000}
        send = client.post("/v1/whatif", json={  # the policy's choice
            **request, "action": "Send fine-0"}).json()
        collect = client.post("/v1/whatif", json={
            **request, "action": "Send for credit collection-0"}).json()
        margin = 3 * (send["std_error"] + collect["std_error"])
        assert send["projected_kpi"] > collect["projected_kpi"] + margin

    def test_finished_execution_is_conflict(self, client):
        response = client.post("/v1/whatif", json={
            "scenario_id": "fines",
            "events": fines_events(("Send fine", 10), ("Payment", 25)),
            "action": "Send fine-0"})
        assert response.status_code == 409

    def test_unavailable_action_is_unprocessable(self, client):
        response = client.post("/v1/whatif", json={
            "scenario_id": "fines", "events": fines_events(),
            "action": "Dance-0"})
        assert response.status_code == 422


class TestReload:
    def test_reload_swaps_and_failure_keeps_serving(self, artifacts):
        app = create_app(artifacts / "mdp.json", artifacts / "policy.json",
                         "fines")
        with TestClient(app) as client:
            assert client.post("/v1/admin/reload").json()["status"] == "reloaded"

            policy_path = artifacts / "policy.json"
            original = policy_path.read_bytes()
            try:
                policy_path.write_text("{broken")
                response = client.post("/v1/admin/reload")
                assert response.status_code == 500
                assert "previous artifacts" in response.json()["detail"]
                # the old bundle keeps answering
                assert client.get("/v1/health").json()["status"] == "ok"
                body = client.post("/v1/recommend", json={
                    "scenario_id": "fines", "events": []}).json()
                assert body["ranked"][0]["action"] == "Create fine-0"
            finally:
                policy_path.write_bytes(original)


class TestBundle:
    def test_scenario_mismatch_rejected(self, artifacts):
        with pytest.raises(BundleError, match="scenario"):
            load_bundle(artifacts / "mdp.json", artifacts / "policy.json",
                        "loans")

    def test_policy_for_unknown_states_rejected(self, artifacts, tmp_path,
                                                fines_mdp):
        policy = Policy(kind="optimal",
                        mapping={State("Nowhere"): "Create fine-0"},
                        scenario_id="fines")
        path = tmp_path / "foreign.json"
        save_policy_artifact(path, policy)
        with pytest.raises(BundleError, match="state"):
            load_bundle(artifacts / "mdp.json", path, "fines")

    def test_fingerprints_equal_stored_checksums(self, artifacts):
        import json
        bundle = load_bundle(artifacts / "mdp.json", artifacts / "policy.json",
                             "fines")
        stored_mdp = json.loads((artifacts / "mdp.json").read_text())["checksum"]
        stored_policy = json.loads((artifacts / "policy.json").read_text())["checksum"]
        assert bundle.fingerprints["mdp"] == stored_mdp
        assert bundle.fingerprints["policy"] == stored_policy
