"""Map an ongoing execution onto the learned state space and rank actions.

Pure functions over loaded artifacts; the HTTP layer only does transport.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from ..log.model import AnnotatedTrace, Event, Scalar, Trace
from ..mdp.build import current_state
from ..mdp.model import Mdp, START_STATE, State
from ..rl.policy import Policy, QTable
from ..scenario.annotate import AnnotationError, annotate_trace
from ..scenario.spec import MissingDurationsError, ScenarioSpec


class ResolutionError(ValueError):
    """The ongoing execution cannot be mapped onto the learned state space."""


@dataclass(frozen=True)
class ResolvedState:
    state: State
    fallback_used: bool
    annotated: AnnotatedTrace | None  # None for an empty execution


@dataclass(frozen=True)
class RankedAction:
    action: str
    q_value: float | None
    support: int

    def to_dict(self) -> dict:
        return {"action": self.action, "q_value": self.q_value, "support": self.support}


@dataclass(frozen=True)
class Recommendation:
    resolved_state: State
    fallback_used: bool
    terminal: bool
    ranked: tuple[RankedAction, ...]
    kpi_so_far: float | None

    def to_dict(self) -> dict:
        return {
            "resolved_state": {**self.resolved_state.to_dict(),
                               "display": str(self.resolved_state)},
            "fallback_used": self.fallback_used,
            "terminal": self.terminal,
            "ranked": [r.to_dict() for r in self.ranked],
            "kpi_so_far": self.kpi_so_far,
        }


def annotate_prefix(events: Sequence[Event], trace_attrs: dict[str, Scalar],
                    spec: ScenarioSpec) -> AnnotatedTrace | None:
    """Annotate an ongoing (incomplete) execution; None when it is empty."""
    if not events:
        return None
    trace = Trace(case_id="__live__", events=tuple(events), trace_attrs=trace_attrs)
    try:
        return annotate_trace(trace, spec, complete=False)
    except AnnotationError as exc:
        raise ResolutionError(str(exc)) from None


def _hf_drop_order(annotated: AnnotatedTrace, spec: ScenarioSpec) -> list[int]:
    """HF component positions, the one whose value changed most recently first.

    Ties (same last-change event, including never-changed components) break
    toward the later-declared component.
    """
    names = spec.hf_names
    series = [[e.derived[name] for e in annotated.events] for name in names]
    last_change = []
    for values in series:
        change = -1
        for j in range(1, len(values)):
            if values[j] != values[j - 1]:
                change = j
        last_change.append(change)
    return sorted(range(len(names)), key=lambda i: (last_change[i], i), reverse=True)


def _support(mdp: Mdp, state: State) -> int:
    return sum(e.count for edges in mdp.transition_groups(state).values() for e in edges)


def _most_supported(mdp: Mdp, candidates: list[State]) -> State:
    return min(candidates, key=lambda s: (-_support(mdp, s), s.key()))


def resolve_state(events: Sequence[Event], trace_attrs: dict[str, Scalar],
                  mdp: Mdp, spec: ScenarioSpec) -> ResolvedState:
    """Resolve an ongoing execution to a state of the learned MDP.

    The empty execution is the synthetic start state. Otherwise the state
    after the last event is looked up exactly (also as a terminal state, since
    a learned end-of-case looks the same from inside a still-open execution).
    When the exact state was never seen in training, history-feature
    components are relaxed one at a time — the most recently changed first —
    until known states match; among matches the one with the most training
    support wins. As a last resort any state with the same last activity is
    accepted. Every relaxed resolution is flagged.
    """
    annotated = annotate_prefix(events, trace_attrs, spec)
    if annotated is None:
        if not mdp.has_state(START_STATE):
            raise ResolutionError("the loaded model has no start state")
        return ResolvedState(START_STATE, fallback_used=False, annotated=None)

    exact = current_state(annotated, spec)
    if mdp.has_state(exact):
        return ResolvedState(exact, fallback_used=False, annotated=annotated)
    as_terminal = replace(exact, terminal=True)
    if mdp.has_state(as_terminal):
        return ResolvedState(as_terminal, fallback_used=False, annotated=annotated)

    candidates = [s for s in mdp.nonterminal_states if s.la == exact.la]
    drop_order = _hf_drop_order(annotated, spec)
    relaxed: set[int] = set()
    for position in drop_order:
        relaxed.add(position)
        matches = [
            s for s in candidates
            if s.ef == exact.ef
            and all(s.hf[i] == exact.hf[i] for i in range(len(exact.hf)) if i not in relaxed)
        ]
        if matches:
            return ResolvedState(_most_supported(mdp, matches), fallback_used=True,
                                 annotated=annotated)
    if candidates:
        return ResolvedState(_most_supported(mdp, candidates), fallback_used=True,
                             annotated=annotated)
    raise ResolutionError(
        f"no learned state matches an execution currently at {exact!s}"
    )


def _kpi_so_far(annotated: AnnotatedTrace | None, spec: ScenarioSpec) -> float | None:
    if annotated is None:
        return 0.0
    total = 0.0
    for event in annotated.events:
        try:
            terms = spec.reward.event_terms(event, annotated.trace_attrs, spec.duration_table)
        except MissingDurationsError:
            return None
        total += sum(terms)
    return total


def rank_actions(state: State, mdp: Mdp, policy: Policy, q: QTable | None) -> tuple[RankedAction, ...]:
    """All actions at ``state``, highest Q first, the policy's choice on top.

    Actions the training never estimated carry a null Q and sort last.
    """
    groups = mdp.transition_groups(state)
    ranked = []
    for action, edges in groups.items():
        q_value = None
        if q is not None and q.count(state, action) > 0:
            q_value = q.get(state, action)
        ranked.append(RankedAction(action, q_value, sum(e.count for e in edges)))
    ranked.sort(key=lambda r: (r.q_value is None, -(r.q_value or 0.0), r.action))
    choice = policy.mapping.get(state) if not policy.is_random else None
    if choice is not None:
        for i, entry in enumerate(ranked):
            if entry.action == choice and i > 0:
                ranked.insert(0, ranked.pop(i))
                break
    return tuple(ranked)


def recommend(events: Sequence[Event], trace_attrs: dict[str, Scalar],
              mdp: Mdp, spec: ScenarioSpec, policy: Policy,
              q: QTable | None) -> Recommendation:
    """Ranked next activities for an ongoing execution (empty when it ended)."""
    resolved = resolve_state(events, trace_attrs, mdp, spec)
    kpi = _kpi_so_far(resolved.annotated, spec)
    if resolved.state.terminal:
        return Recommendation(resolved.state, resolved.fallback_used, terminal=True,
                              ranked=(), kpi_so_far=kpi)
    ranked = rank_actions(resolved.state, mdp, policy, q)
    return Recommendation(resolved.state, resolved.fallback_used, terminal=False,
                          ranked=ranked, kpi_so_far=kpi)
