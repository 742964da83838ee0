"""Built-in scenario specs for the two bundled decision problems."""
from __future__ import annotations

from importlib import resources

from .spec import (
    AcceptanceInterestTerm,
    ActivityCostTerm,
    AmountClassRule,
    CounterRule,
    EventPenaltyTerm,
    PaymentCreditsTerm,
    PaymentRule,
    RewardSpec,
    ScenarioSpec,
    TimeBucketRule,
    load_spec,
    spec_from_dict,
)
import json

HOURLY_RATE = 18.0
INTEREST_RATES = {"low": 0.16, "medium": 0.18, "high": 0.20}


def loans_spec() -> ScenarioSpec:
    """Loan-request handling: the bank acts, the customer responds.

    KPI = interest earned on accepted offers minus the cost of the bank's
    working time. The interest rate depends on the requested amount class.
    """
    return ScenarioSpec(
        scenario_id="loans",
        agent_activities=frozenset({
            "Accept application",
            "Decline application",
            "Create offer",
            "Send offer",
            "Call customer",
            "Request missing info",
            "Fix application",
        }),
        env_activities=frozenset({
            "Submit application",
            "Cancel application",
            "Send offer back",
            "Accept offer",
            "Decline offer",
        }),
        hf_rules=(
            CounterRule("call#", frozenset({"Call customer"}), after=frozenset({"Send offer"})),
            CounterRule("miss#", frozenset({"Request missing info"})),
            CounterRule("offer#", frozenset({"Create offer"})),
            CounterRule("reply#", frozenset({"Send offer back"})),
            CounterRule("fix", frozenset({"Fix application"}), boolean=True),
        ),
        ef_rules=(
            AmountClassRule("amClass", "amount", bounds=(6000.0, 15000.0),
                            labels=("low", "medium", "high"), from_trace=True,
                            upper_inclusive=True),
        ),
        reward=RewardSpec((
            AcceptanceInterestTerm(
                acceptance_activities=frozenset({"Accept offer"}),
                class_feature="amClass",
                rates=INTEREST_RATES,
                amount_source="amount",
                attenuated=True,
            ),
            ActivityCostTerm(rate_per_hour=HOURLY_RATE),
        )),
        success_activities=frozenset({"Accept offer"}),
    )


def fines_spec() -> ScenarioSpec:
    """Road-fine collection: the police department acts, the offender responds.

    KPI = credits earned for a full payment (3 within six months, 2 within
    twelve, 1 later), none if never fully paid, minus 1 if the offender's
    appeal is upheld. Actions carry the two-month bucket they were taken in.
    """
    return ScenarioSpec(
        scenario_id="fines",
        agent_activities=frozenset({
            "Create fine",
            "Send fine",
            "Add penalty",
            "Send for credit collection",
        }),
        env_activities=frozenset({
            "Payment",
            "Appeal to judge",
            "Appeal to prefecture",
            "Appeal upheld",
            "Appeal dismissed",
        }),
        hf_rules=(TimeBucketRule("2months", bucket_days=60),),
        ef_rules=(
            AmountClassRule("amClass", "amount", bounds=(50.0,), labels=("low", "high"),
                            from_trace=False, upper_inclusive=False),
        ),
        action_bucket_feature="2months",
        payment=PaymentRule(
            payment_activities=frozenset({"Payment"}),
            owed_source="amount",
            paid_attr="paid",
            appeal_activities=frozenset({"Appeal to judge", "Appeal to prefecture"}),
        ),
        reward=RewardSpec((
            PaymentCreditsTerm(schedule=((2, 3.0), (5, 2.0)), late_credits=1.0,
                               bucket_feature="2months"),
            EventPenaltyTerm(activities=frozenset({"Appeal upheld"}), value=-1.0),
        )),
        success_activities=frozenset({"Payment"}),
    )


_BUILTIN = {"loans": loans_spec, "fines": fines_spec}


def builtin_spec(scenario_id: str) -> ScenarioSpec:
    try:
        return _BUILTIN[scenario_id]()
    except KeyError:
        raise KeyError(f"unknown built-in scenario {scenario_id!r}; "
                       f"choose from {sorted(_BUILTIN)}") from None


def bundled_spec(scenario_id: str) -> ScenarioSpec:
    """Load a built-in scenario from its bundled JSON config file."""
    ref = resources.files(__package__) / "configs" / f"{scenario_id}.json"
    return spec_from_dict(json.loads(ref.read_text(encoding="utf-8")))


def resolve_spec(name_or_path: str) -> ScenarioSpec:
    """A built-in scenario id, or a path to a scenario config file."""
    if name_or_path in _BUILTIN:
        return builtin_spec(name_or_path)
    return load_spec(name_or_path)
