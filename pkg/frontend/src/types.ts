/** JSON shapes exchanged with the recommendation service (API v1).
 *
 * These mirror the service's wire format exactly; the console never adds,
 * reorders, or recomputes anything inside them.  Ranked lists are displayed
 * in the order they arrive.
 */

/** Attribute values allowed on events and traces. */
export type Scalar = string | number | boolean;

/** One event of the running case, as entered by the operator. */
export interface CaseEvent {
  activity: string;
  timestamp: string;
  payload: Record<string, Scalar>;
}

/** Build a case event with a fixed field order so serialization is stable. */
export function makeEvent(
  activity: string,
  timestamp: string,
  payload: Record<string, Scalar> = {},
): CaseEvent {
  return { activity, timestamp, payload: { ...payload } };
}

export function copyEvent(event: CaseEvent): CaseEvent {
  return makeEvent(event.activity, event.timestamp, event.payload);
}

/** The model state a case history was matched to. */
export interface ResolvedState {
  la: string;
  hf: number[];
  ef: string[];
  terminal: boolean;
  display: string;
}

/** One candidate next action with its estimated long-run value. */
export interface RankedAction {
  action: string;
  q_value: number | null;
  support: number;
}

/** Response of POST /v1/recommend. */
export interface Recommendation {
  scenario_id: string;
  resolved_state: ResolvedState;
  fallback_used: boolean;
  terminal: boolean;
  ranked: RankedAction[];
  kpi_so_far: number | null;
}

/** Response of POST /v1/whatif. */
export interface WhatIfProjection {
  scenario_id: string;
  resolved_state: ResolvedState;
  fallback_used: boolean;
  action: string;
  projected_kpi: number;
  std_error: number;
  outcome_rate: number;
  n_cases: number;
  seed: number;
}

/** Response of GET /v1/policy/meta. */
export interface PolicyMeta {
  scenario_id: string;
  mdp: {
    fingerprint: string;
    n_states: number;
    n_actions: number;
    n_edges: number;
    meta: Record<string, unknown>;
  };
  policy: {
    fingerprint: string;
    kind: string;
    n_states: number;
  };
  training: Record<string, unknown>;
  paths: Record<string, string>;
}

/** Response of GET /v1/health. */
export interface HealthStatus {
  status: string;
  scenario_id: string;
  policy_fingerprint: string;
}
