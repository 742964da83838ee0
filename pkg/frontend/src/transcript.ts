/** Pure text rendering of session state.
 *
 * Everything here is a function of service response bytes already held by
 * the session: rankings are printed in the order the service sent them,
 * resolved states use the service's own display string, and no value is
 * recomputed locally.  The DOM layer and the tests share these renderers.
 */
import type { TranscriptStep } from "./session.js";
import type {
  PolicyMeta,
  RankedAction,
  Recommendation,
  WhatIfProjection,
} from "./types.js";

export const FALLBACK_BADGE = "[!] no exact match for this history; showing the closest modelled state";

function formatKpi(kpi: number | null): string {
  return kpi === null ? "n/a" : kpi.toFixed(4);
}

export function renderRankedLine(index: number, entry: RankedAction): string {
  const q = entry.q_value === null ? "not estimated" : entry.q_value.toFixed(4);
  return `${index + 1}. ${entry.action}  q=${q}  support=${entry.support}`;
}

/** Render one transcript row: what was entered, the resolved state, and
 * either the ranking (running case) or the closing banner (ended case). */
export function renderStep(step: TranscriptStep): string {
  const rec = JSON.parse(step.recommendationRaw) as Recommendation;
  const lines: string[] = [];
  if (step.entered === null) {
    lines.push("> case opened");
  } else {
    lines.push(`> recorded ${step.entered.activity} @ ${step.entered.timestamp}`);
  }
  lines.push(`state: ${rec.resolved_state.display}`);
  if (rec.fallback_used) {
    lines.push(FALLBACK_BADGE);
  }
  if (rec.terminal) {
    lines.push(`=== case complete — final KPI ${formatKpi(rec.kpi_so_far)} ===`);
  } else {
    lines.push(`KPI so far: ${formatKpi(rec.kpi_so_far)}`);
    if (rec.ranked.length === 0) {
      lines.push("no next activities known for this state");
    }
    rec.ranked.forEach((entry, index) => {
      lines.push(renderRankedLine(index, entry));
    });
  }
  return lines.join("\n");
}

/** Render the whole history panel of the current branch. */
export function renderTranscript(steps: readonly TranscriptStep[]): string {
  return steps.map(renderStep).join("\n\n");
}

export function renderProjection(projection: WhatIfProjection): string {
  return (
    `what-if ${projection.action}: projected KPI ` +
    `${projection.projected_kpi.toFixed(4)} ± ${projection.std_error.toFixed(4)} ` +
    `(outcome rate ${projection.outcome_rate.toFixed(3)}, ` +
    `n=${projection.n_cases}, seed ${projection.seed})`
  );
}

/** Render the info panel: scenario, fingerprints, and how the policy was
 * trained — straight from GET /v1/policy/meta. */
export function renderMeta(meta: PolicyMeta): string {
  const training = Object.entries(meta.training)
    .map(([key, value]) => `${key}=${String(value)}`)
    .join(" ");
  return [
    `scenario: ${meta.scenario_id}`,
    `policy fingerprint: ${meta.policy.fingerprint}`,
    `model fingerprint: ${meta.mdp.fingerprint}`,
    `model size: ${meta.mdp.n_states} states / ${meta.mdp.n_actions} actions / ${meta.mdp.n_edges} edges`,
    `policy: ${meta.policy.kind} over ${meta.policy.n_states} states`,
    `training: ${training}`,
  ].join("\n");
}
