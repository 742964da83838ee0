"""Synthetic event-log generators for the two bundled scenarios.

Both generators sample from a small hidden process whose branch structure is
fixed in this module, so tests (and demos) know exactly which states exist,
which action is best where, and how the habitual behavior differs from the
best one.  Amounts are one representative figure per amount class and the
within-trace timing is fixed per branch, which keeps every reward on a
replayed edge identical across the traces that support it.

Fines-like process (amounts 40 / 80; days in brackets):
    Create fine[0] -> {Send fine[10] | Send for credit collection[10] (dead end)}
    after Send fine: offender pays in full[40] with p_pay0, else the agent
    decides again at day 70: {Add penalty | Send for credit collection};
    after Add penalty: full payment[100] | late full payment[200] |
    appeal[100] upheld[160] | nothing.
    The habitual behavior prefers "Send for credit collection" over
    "Add penalty" for low fines, although the penalty is worth more.

Loans-like process (hours between events; amounts 5000 / 10000 / 20000):
    Submit application -> {Create offer -> Send offer | Decline application}
    after Send offer: Accept offer | Decline offer | Send offer back;
    after Send offer back: {Call customer -> Accept/Decline | Decline application}.
    The habitual behavior gives up on low-amount call-backs, although
    calling is worth far more than it costs.
"""
from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np

from .._validation import check_positive_int, check_rng
from ..log.model import Event, EventLog, Trace

# --- fines-like hidden process ---------------------------------------------

FINES_AMOUNTS = {"low": 40.0, "high": 80.0}
FINES_P_LOW = 0.5
# after "Send fine": probability the offender just pays (day 40)
FINES_P_PAY0 = {"low": 0.5, "high": 0.4}
# habitual behavior at the two decision points
FINES_P_SEND_FINE = 0.75          # vs. credit collection right away
FINES_P_ADD_PENALTY = {"low": 0.4, "high": 0.7}  # vs. credit collection
# after "Add penalty": (full payment day 100, late payment day 200,
#                       appeal upheld, nothing) per amount class
FINES_PENALTY_OUTCOMES = {
    "low": (0.55, 0.15, 0.10, 0.20),
    "high": (0.60, 0.20, 0.15, 0.05),
}


def synthetic_fines_log(n_traces: int = 1000, seed: int | np.random.Generator = 0,
                        start: datetime | None = None) -> EventLog:
    """Sample a fines-like event log from the hidden process above."""
    check_positive_int(n_traces, "n_traces")
    rng = check_rng(seed)
    if start is None:
        start = datetime(2021, 3, 1, 9, 0, tzinfo=timezone.utc)
    traces = []
    for i in range(n_traces):
        t0 = start + timedelta(minutes=i)
        cls = "low" if rng.random() < FINES_P_LOW else "high"
        amount = FINES_AMOUNTS[cls]
        events = [Event("Create fine", t0, {"amount": amount})]

        def at(day: int) -> datetime:
            return t0 + timedelta(days=day)

        if rng.random() >= FINES_P_SEND_FINE:
            events.append(Event("Send for credit collection", at(10)))
        else:
            events.append(Event("Send fine", at(10)))
            if rng.random() < FINES_P_PAY0[cls]:
                events.append(Event("Payment", at(40)))
            elif rng.random() >= FINES_P_ADD_PENALTY[cls]:
                events.append(Event("Send for credit collection", at(70)))
            else:
                events.append(Event("Add penalty", at(70)))
                p_pay, p_late, p_appeal, _ = FINES_PENALTY_OUTCOMES[cls]
                roll = rng.random()
                if roll < p_pay:
                    events.append(Event("Payment", at(100)))
                elif roll < p_pay + p_late:
                    events.append(Event("Payment", at(200)))
                elif roll < p_pay + p_late + p_appeal:
                    events.append(Event("Appeal to judge", at(100)))
                    events.append(Event("Appeal upheld", at(160)))
                # else: nothing more ever happens
        traces.append(Trace(case_id=f"F{i + 1:05d}", events=tuple(events)))
    return EventLog(traces=tuple(traces), schema={"amount": "decimal"})


# --- loans-like hidden process ---------------------------------------------

LOANS_AMOUNTS = {"low": 5000.0, "medium": 10000.0, "high": 20000.0}
LOANS_CLASS_P = (("low", 0.4), ("medium", 0.35), ("high", 0.25))
# habitual behavior
LOANS_P_CREATE_OFFER = 0.8        # vs. declining the application outright
LOANS_P_CALL = {"low": 0.35, "medium": 0.7, "high": 0.7}  # vs. giving up
# environment response to a sent offer: (accept, decline, send back)
LOANS_OFFER_OUTCOMES = {
    "low": (0.45, 0.25, 0.30),
    "medium": (0.40, 0.25, 0.35),
    "high": (0.35, 0.30, 0.35),
}
# acceptance probability after a follow-up call
LOANS_P_ACCEPT_AFTER_CALL = {"low": 0.65, "medium": 0.55, "high": 0.5}
# constant within-trace gaps, hours: the gap after an activity is its duration
LOANS_GAP_HOURS = {
    "Submit application": 1.0,
    "Create offer": 2.0,
    "Send offer": 1.0,
    "Accept offer": 1.0,
    "Decline offer": 1.0,
    "Send offer back": 1.0,
    "Call customer": 2.0,
}


def synthetic_loans_log(n_traces: int = 1000, seed: int | np.random.Generator = 0,
                        start: datetime | None = None) -> EventLog:
    """Sample a loans-like event log from the hidden process above."""
    check_positive_int(n_traces, "n_traces")
    rng = check_rng(seed)
    if start is None:
        start = datetime(2022, 3, 1, 9, 0, tzinfo=timezone.utc)
    class_labels = [c for c, _ in LOANS_CLASS_P]
    class_probs = [p for _, p in LOANS_CLASS_P]
    traces = []
    for i in range(n_traces):
        cls = class_labels[int(rng.choice(len(class_labels), p=class_probs))]
        amount = LOANS_AMOUNTS[cls]
        clock = start + timedelta(minutes=i)
        activities = ["Submit application"]

        if rng.random() >= LOANS_P_CREATE_OFFER:
            activities.append("Decline application")
        else:
            activities += ["Create offer", "Send offer"]
            p_acc, p_dec, _ = LOANS_OFFER_OUTCOMES[cls]
            roll = rng.random()
            if roll < p_acc:
                activities.append("Accept offer")
            elif roll < p_acc + p_dec:
                activities.append("Decline offer")
            else:
                activities.append("Send offer back")
                if rng.random() >= LOANS_P_CALL[cls]:
                    activities.append("Decline application")
                else:
                    activities.append("Call customer")
                    if rng.random() < LOANS_P_ACCEPT_AFTER_CALL[cls]:
                        activities.append("Accept offer")
                    else:
                        activities.append("Decline offer")

        events = []
        for activity in activities:
            events.append(Event(activity, clock))
            clock = clock + timedelta(hours=LOANS_GAP_HOURS.get(activity, 1.0))
        traces.append(Trace(case_id=f"L{i + 1:05d}", events=tuple(events),
                            trace_attrs={"amount": amount}))
    return EventLog(traces=tuple(traces))


def synthetic_log(scenario_id: str, n_traces: int = 1000,
                  seed: int | np.random.Generator = 0) -> EventLog:
    if scenario_id == "fines":
        return synthetic_fines_log(n_traces, seed)
    if scenario_id == "loans":
        return synthetic_loans_log(n_traces, seed)
    raise KeyError(f"no synthetic generator for scenario {scenario_id!r}")
