"""Load the artifact set one server instance serves: MDP, policy, scenario."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..artifacts import checksum
from ..mdp.io import load_mdp
from ..mdp.model import Mdp
from ..rl.io import load_policy_artifact
from ..rl.policy import Policy, QTable
from ..rl.sampling import EpisodeSampler
from ..scenario.builtin import resolve_spec
from ..scenario.spec import ScenarioSpec


class BundleError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceBundle:
    """An immutable snapshot of everything one recommendation server serves."""

    spec: ScenarioSpec
    mdp: Mdp
    policy: Policy
    q: QTable | None
    training_meta: dict
    fingerprints: dict[str, str]
    paths: dict[str, str]
    _sampler_box: list = field(default_factory=list, repr=False)

    @property
    def scenario_id(self) -> str:
        return self.spec.scenario_id

    def sampler(self) -> EpisodeSampler:
        """Shared episode sampler, built on first use (what-if projections)."""
        if not self._sampler_box:
            self._sampler_box.append(EpisodeSampler(self.mdp))
        return self._sampler_box[0]

    def meta(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "mdp": {
                "fingerprint": self.fingerprints["mdp"],
                "n_states": self.mdp.n_states,
                "n_actions": len(self.mdp.action_labels),
                "n_edges": self.mdp.n_edges,
                "meta": dict(self.mdp.meta),
            },
            "policy": {
                "fingerprint": self.fingerprints["policy"],
                "kind": self.policy.kind,
                "n_states": len(self.policy.mapping),
            },
            "training": dict(self.training_meta),
            "paths": dict(self.paths),
        }


def load_bundle(mdp_path: str | Path, policy_path: str | Path,
                scenario: str | Path) -> ServiceBundle:
    """Load and cross-check the three artifacts a server instance needs.

    ``scenario`` is a built-in scenario id or a path to a scenario config.
    """
    mdp = load_mdp(mdp_path)
    policy, q, training_meta = load_policy_artifact(policy_path)
    spec = resolve_spec(str(scenario))

    mdp_scenario = mdp.meta.get("scenario_id")
    if mdp_scenario is not None and mdp_scenario != spec.scenario_id:
        raise BundleError(
            f"MDP artifact belongs to scenario {mdp_scenario!r}, "
            f"not {spec.scenario_id!r}")
    if policy.scenario_id is not None and policy.scenario_id != spec.scenario_id:
        raise BundleError(
            f"policy artifact belongs to scenario {policy.scenario_id!r}, "
            f"not {spec.scenario_id!r}")
    unknown = {s for s in policy.mapping} - set(mdp.states)
    if unknown:
        raise BundleError(
            f"policy maps {len(unknown)} states the MDP does not contain; "
            f"artifacts are from different builds")

    fingerprints = {
        "mdp": checksum(mdp.to_dict()),
        "policy": checksum({"policy": policy.to_dict(),
                            "q": q.to_dict() if q is not None else None,
                            "meta": dict(sorted(training_meta.items()))}),
    }
    return ServiceBundle(
        spec=spec, mdp=mdp, policy=policy, q=q, training_meta=training_meta,
        fingerprints=fingerprints,
        paths={"mdp": str(mdp_path), "policy": str(policy_path),
               "scenario": str(scenario)},
    )


class BundleHolder:
    """Hands out the current immutable bundle; swap replaces it atomically."""

    def __init__(self, bundle: ServiceBundle):
        self._bundle = bundle
        self._lock = threading.Lock()

    @property
    def current(self) -> ServiceBundle:
        return self._bundle

    def reload(self) -> ServiceBundle:
        """Re-read the artifacts from their original paths and swap."""
        paths = self.current.paths
        fresh = load_bundle(paths["mdp"], paths["policy"], paths["scenario"])
        with self._lock:
            self._bundle = fresh
        return fresh
