"""HTTP API serving next-activity recommendations from loaded artifacts.

Endpoints (all JSON, schemas versioned under /v1):
  POST /v1/recommend    ranked next activities for an ongoing execution
  POST /v1/whatif       projected KPI of forcing one action, then the policy
  GET  /v1/policy/meta  scenario, artifact fingerprints, training config
  GET  /v1/health       liveness probe
  POST /v1/admin/reload re-read artifacts from disk, swap atomically
"""
from __future__ import annotations

from datetime import datetime
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ..log.model import Event, Scalar
from ..evaluate.simulation import project_action
from .bundle import BundleError, BundleHolder, ServiceBundle, load_bundle
from .resolve import ResolutionError, recommend, resolve_state

API_VERSION = "v1"


class EventIn(BaseModel):
    activity: str = Field(min_length=1)
    timestamp: datetime
    payload: dict[str, Scalar] = Field(default_factory=dict)


class RecommendationRequest(BaseModel):
    scenario_id: str
    events: list[EventIn] = Field(default_factory=list)
    trace_attrs: dict[str, Scalar] = Field(default_factory=dict)


class WhatIfRequest(RecommendationRequest):
    action: str = Field(min_length=1)
    n_cases: int = Field(default=2000, ge=1, le=200_000)
    seed: int = 0


def _to_events(request: RecommendationRequest) -> list[Event]:
    try:
        return [Event(e.activity, e.timestamp, e.payload) for e in request.events]
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def _check_scenario(request: RecommendationRequest, bundle: ServiceBundle) -> None:
    if request.scenario_id != bundle.scenario_id:
        raise HTTPException(
            status_code=409,
            detail=f"this server serves scenario {bundle.scenario_id!r}, "
                   f"not {request.scenario_id!r}")


def create_app(mdp_path: str | Path, policy_path: str | Path,
               scenario: str | Path) -> FastAPI:
    holder = BundleHolder(load_bundle(mdp_path, policy_path, scenario))
    app = FastAPI(title="next-activity recommendation service", version="0.1.0")
    app.state.holder = holder

    @app.post(f"/{API_VERSION}/recommend")
    def recommend_endpoint(request: RecommendationRequest) -> dict[str, Any]:
        bundle = holder.current
        _check_scenario(request, bundle)
        events = _to_events(request)
        try:
            result = recommend(events, dict(request.trace_attrs), bundle.mdp,
                               bundle.spec, bundle.policy, bundle.q)
        except ResolutionError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {"scenario_id": bundle.scenario_id, **result.to_dict()}

    @app.post(f"/{API_VERSION}/whatif")
    def whatif_endpoint(request: WhatIfRequest) -> dict[str, Any]:
        bundle = holder.current
        _check_scenario(request, bundle)
        events = _to_events(request)
        try:
            resolved = resolve_state(events, dict(request.trace_attrs),
                                     bundle.mdp, bundle.spec)
        except ResolutionError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        if resolved.state.terminal:
            raise HTTPException(
                status_code=409,
                detail=f"execution has ended at {resolved.state!s}; "
                       f"nothing left to decide")
        try:
            report = project_action(bundle.mdp, bundle.policy, resolved.state,
                                    request.action, n_cases=request.n_cases,
                                    seed=request.seed, sampler=bundle.sampler())
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return {
            "scenario_id": bundle.scenario_id,
            "resolved_state": {**resolved.state.to_dict(),
                               "display": str(resolved.state)},
            "fallback_used": resolved.fallback_used,
            "action": request.action,
            "projected_kpi": report.avg_kpi,
            "std_error": report.std_error,
            "outcome_rate": report.outcome_rate,
            "n_cases": report.n_cases,
            "seed": request.seed,
        }

    @app.get(f"/{API_VERSION}/policy/meta")
    def meta_endpoint() -> dict[str, Any]:
        return holder.current.meta()

    @app.get(f"/{API_VERSION}/health")
    def health_endpoint() -> dict[str, Any]:
        bundle = holder.current
        return {"status": "ok", "scenario_id": bundle.scenario_id,
                "policy_fingerprint": bundle.fingerprints["policy"]}

    @app.post(f"/{API_VERSION}/admin/reload")
    def reload_endpoint() -> dict[str, Any]:
        try:
            fresh = holder.reload()
        except (OSError, ValueError, BundleError) as exc:
            raise HTTPException(status_code=500,
                                detail=f"reload failed, previous artifacts "
                                       f"still served: {exc}") from None
        return {"status": "reloaded", **fresh.meta()}

    return app
