"""Compile an annotated event log into an MDP by replaying its traces.

Replay walks each trace through the decision points of the supported actor:
every agent event is one action, taken from the state reached after the
previous event, and landing in the state reached after the action event
plus any environment events that immediately follow it (their rewards are
folded into the step).  Environment events before the first agent event
form the trace's initial state; traces that open with an agent event start
from the distinguished start state.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_fraction, check_positive
from ..log.model import Actor, AnnotatedEvent, AnnotatedLog, AnnotatedTrace, EventLog
from ..scenario.annotate import annotate, state_components
from ..scenario.spec import MissingDurationsError, ScenarioSpec
from .model import START_STATE, Action, Edge, Mdp, State, states_of


def reliability_coefficient(n: int, lam: float = 3.0) -> float:
    """How much to trust a reward estimated from ``n`` observations, in [0, 1].

    Grows as (n/lam)^2 / (1 + (n/lam)^2): near 0 for rarely seen edges,
    approaching 1 once the support is well past ``lam``.  ``lam=0`` disables
    the damping entirely (full trust for any observed edge).
    """
    if n < 0:
        raise ValueError(f"support count must be >= 0, got {n}")
    if lam == 0:
        return 1.0 if n > 0 else 0.0
    check_positive(lam, "lam")
    ratio = (n / lam) ** 2
    return ratio / (1.0 + ratio)


@dataclass(frozen=True)
class Transition:
    """One observed decision: action taken, where it landed, rewards collected.

    ``event_index`` is the position of the action event within its trace.
    """

    source: State
    action: Action
    target: State
    plain_reward: float
    attenuated_reward: float
    event_index: int

    @property
    def reward(self) -> float:
        return self.plain_reward + self.attenuated_reward


@dataclass(frozen=True)
class ReplayResult:
    initial: State | None
    transitions: tuple[Transition, ...]


def _state_after(event: AnnotatedEvent, spec: ScenarioSpec, terminal: bool) -> State:
    la, hf, ef = state_components(event, spec)
    return State(la=la, hf=hf, ef=ef, terminal=terminal)


def current_state(trace: AnnotatedTrace, spec: ScenarioSpec) -> State:
    """State of an execution after its last event (the start state if empty)."""
    if not trace.events:
        return START_STATE
    return _state_after(trace.events[-1], spec, terminal=trace.complete)


def replay_trace(trace: AnnotatedTrace, spec: ScenarioSpec) -> ReplayResult:
    """Decompose one trace into its agent decisions.

    Returns the trace's initial state and one transition per agent event;
    a trace without any agent event yields no decisions and no initial state.
    """
    events = trace.events
    attenuated_mask = tuple(t.attenuated for t in spec.reward.terms)
    agent_idx = [i for i, e in enumerate(events) if e.actor is Actor.AGENT]
    if not agent_idx:
        return ReplayResult(initial=None, transitions=())

    first = agent_idx[0]
    initial = START_STATE if first == 0 else _state_after(events[first - 1], spec, terminal=False)

    transitions = []
    for i in agent_idx:
        j = i
        while j + 1 < len(events) and events[j + 1].actor is Actor.ENVIRONMENT:
            j += 1
        source = START_STATE if i == 0 else _state_after(events[i - 1], spec, terminal=False)
        target = _state_after(events[j], spec,
                              terminal=(j == len(events) - 1 and trace.complete))
        plain = attenuated = 0.0
        for event in events[i:j + 1]:
            contribs = spec.reward.event_terms(event, trace.trace_attrs, spec.duration_table)
            for value, is_attenuated in zip(contribs, attenuated_mask):
                if is_attenuated:
                    attenuated += value
                else:
                    plain += value
        transitions.append(Transition(
            source=source,
            action=spec.action_label(events[i]),
            target=target,
            plain_reward=plain,
            attenuated_reward=attenuated,
            event_index=i,
        ))
    return ReplayResult(initial=initial, transitions=tuple(transitions))


@dataclass(frozen=True)
class TransitionGroup:
    """All observed occurrences of one (source, action, target) transition."""

    source: State
    action: Action
    target: State
    count: int
    plain_sum: float
    attenuated_sum: float


@dataclass(frozen=True)
class ReplaySummary:
    """Grouped replay of a whole log, sorted canonically for determinism."""

    groups: tuple[TransitionGroup, ...]
    initial_counts: dict[State, int]
    n_skipped: int
    max_decisions: int


def replay_groups(annotated: AnnotatedLog, spec: ScenarioSpec) -> ReplaySummary:
    """Replay every trace and group the transitions by (source, action, target)."""
    counts: Counter = Counter()
    plain: dict[tuple, float] = {}
    atten: dict[tuple, float] = {}
    initial_counts: Counter = Counter()
    skipped = 0
    max_decisions = 0
    for trace in annotated:
        result = replay_trace(trace, spec)
        if result.initial is None:
            skipped += 1
            continue
        initial_counts[result.initial] += 1
        max_decisions = max(max_decisions, len(result.transitions))
        for t in result.transitions:
            key = (t.source, t.action, t.target)
            counts[key] += 1
            plain[key] = plain.get(key, 0.0) + t.plain_reward
            atten[key] = atten.get(key, 0.0) + t.attenuated_reward
    groups = tuple(sorted(
        (TransitionGroup(source=s, action=a, target=d, count=counts[(s, a, d)],
                         plain_sum=plain[(s, a, d)], attenuated_sum=atten[(s, a, d)])
         for (s, a, d) in counts),
        key=lambda g: (g.source.key(), g.action, g.target.key()),
    ))
    return ReplaySummary(groups=groups, initial_counts=dict(initial_counts),
                         n_skipped=skipped, max_decisions=max_decisions)


def build_mdp(log: AnnotatedLog | EventLog, spec: ScenarioSpec, *,
              lam: float = 3.0, gamma: float = 1.0) -> Mdp:
    """Build the MDP for a scenario from a (possibly not yet annotated) log.

    Edge probabilities are the fractions of observed traces taking each
    grouped transition; edge rewards average the collected rewards, with
    low-support components damped by the reliability coefficient.
    """
    if lam != 0:
        check_positive(lam, "lam")
    check_fraction(gamma, "gamma", inclusive_low=False)
    if isinstance(log, EventLog):
        annotated = annotate(log, spec)
    else:
        annotated = log
        if annotated.scenario_id != spec.scenario_id:
            raise ValueError(
                f"log was annotated for scenario {annotated.scenario_id!r}, "
                f"but the scenario config is for {spec.scenario_id!r}")
    if spec.needs_durations() and spec.duration_table is None:
        raise MissingDurationsError(
            "the reward includes an activity cost term but the scenario config "
            "carries no duration table; call spec.calibrate(train_log) first")

    summary = replay_groups(annotated, spec)
    if not summary.groups:
        raise ValueError(
            "cannot build an MDP: the log contains no agent decisions")
    totals: Counter = Counter()
    for g in summary.groups:
        totals[(g.source, g.action)] += g.count
    edges = tuple(
        Edge(
            source=g.source,
            action=g.action,
            target=g.target,
            probability=g.count / totals[(g.source, g.action)],
            reward=(g.plain_sum + reliability_coefficient(g.count, lam) * g.attenuated_sum)
                   / g.count,
            count=g.count,
        )
        for g in summary.groups
    )
    initial_counts = summary.initial_counts
    n_initial = sum(initial_counts.values())
    initial = {s: c / n_initial for s, c in initial_counts.items()} if n_initial else {}
    meta = {
        "scenario_id": spec.scenario_id,
        "lambda": lam,
        "n_traces": len(annotated),
        "n_decision_traces": n_initial,
        "n_skipped_actionless": summary.n_skipped,
        "n_decisions": sum(g.count for g in summary.groups),
        "max_decisions": summary.max_decisions,
        "success_las": sorted(spec.success_activities),
        "hf_names": list(spec.hf_names),
        "ef_names": list(spec.ef_names),
    }
    mdp = Mdp(
        states=states_of(edges, extra=initial_counts),
        edges=edges,
        initial=initial,
        gamma=gamma,
        meta=meta,
    )
    mdp.validate()
    return mdp


def mdp_stats(mdp: Mdp) -> dict:
    """Size and support summary of a compiled MDP."""
    return {
        "n_states": mdp.n_states,
        "n_actions": len(mdp.action_labels),
        "n_edges": mdp.n_edges,
        "n_terminal_states": len(mdp.terminal_states),
        "n_initial_states": len(mdp.initial),
        "n_decisions": sum(e.count for e in mdp.edges),
        "n_decision_traces": mdp.meta.get("n_decision_traces"),
        "n_skipped_actionless": mdp.meta.get("n_skipped_actionless"),
    }


class MdpBuilder(TransformerMixin, BaseEstimator):
    """Estimator fitting an MDP to an event log for one scenario.

    Parameters
    ----------
    spec : ScenarioSpec
        The scenario describing actors, features, and rewards.
    lam : float, default=3.0
        Reliability scale: edges seen about ``lam`` times are half-trusted.
    gamma : float, default=1.0
        Discount factor stored on the MDP.
    calibrate : bool, default=True
        Estimate per-activity durations from the training log when the
        scenario's reward needs them and the config carries none.
    """

    def __init__(self, spec: ScenarioSpec | None = None, lam: float = 3.0,
                 gamma: float = 1.0, calibrate: bool = True):
        self.spec = spec
        self.lam = lam
        self.gamma = gamma
        self.calibrate = calibrate

    def fit(self, log: EventLog, y=None):
        if self.spec is None:
            raise ValueError("MdpBuilder needs a scenario spec")
        spec = self.spec
        if self.calibrate and spec.needs_durations() and spec.duration_table is None:
            spec = spec.calibrate(log)
        self.spec_ = spec
        self.annotated_ = annotate(log, spec)
        self.mdp_ = build_mdp(self.annotated_, spec, lam=self.lam, gamma=self.gamma)
        self.stats_ = mdp_stats(self.mdp_)
        return self

    def transform(self, log: EventLog) -> Mdp:
        if not hasattr(self, "mdp_"):
            raise ValueError("MdpBuilder is not fitted yet; call fit first")
        return self.mdp_
