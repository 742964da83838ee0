/** Golden-transcript suite.
 *
 * Replays the scripted demo session against the recorded service exchanges
 * and checks, at every step, that what the console holds and renders is
 * byte-identical to what the service answered — the console adds nothing of
 * its own.  When CONSOLE_SERVICE_URL is set, the same script also runs
 * against that live service and must reproduce the recorded bytes.
 */
import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api.js";
import { ConsoleSession } from "../src/session.js";
import {
  FALLBACK_BADGE,
  renderMeta,
  renderProjection,
  renderRankedLine,
  renderStep,
  renderTranscript,
} from "../src/transcript.js";
import type { Recommendation, WhatIfProjection } from "../src/types.js";
import { fixtureFetch, loadTranscript } from "./helpers.js";

function parseProjection(body: string): WhatIfProjection {
  return JSON.parse(body) as WhatIfProjection;
}

const doc = loadTranscript();
const EX = doc.exchanges;

// The scripted session records these exchanges, in order (see scripts/record.mjs).
const META = EX[1]!;
const OPENED = EX[2]!;
const CREATED = EX[3]!;
const SENT = EX[4]!;
const WHATIF_TOP = EX[5]!;
const WHATIF_ALT = EX[6]!;
const EXPLORED = EX[7]!;
const CLOSED = EX[8]!;
const FALLBACK = EX[12]!;
const REJECTED = EX[13]!;
const CREATED_HIGH = EX[21]!;
const SENT_HIGH = EX[24]!;

/** Every reachable decision state of the demo model with more than one
 * candidate action, with the recorded what-if pair for each (the opening
 * state has a single candidate, so there is nothing to compare there). */
const DECISION_STATES = [
  { label: "low amount, fine created", amount: 40.0, sendFine: false, recommend: CREATED, whatIfs: [EX[17]!, EX[18]!] },
  { label: "high amount, fine created", amount: 80.0, sendFine: false, recommend: CREATED_HIGH, whatIfs: [EX[22]!, EX[23]!] },
  { label: "low amount, fine sent", amount: 40.0, sendFine: true, recommend: SENT, whatIfs: [WHATIF_TOP, WHATIF_ALT] },
  { label: "high amount, fine sent", amount: 80.0, sendFine: true, recommend: SENT_HIGH, whatIfs: [EX[25]!, EX[26]!] },
];

const D0 = "2021-03-01T09:00:00Z";
const D25 = "2021-03-26T09:00:00Z";
const D70 = "2021-05-10T09:00:00Z";

function sanity(): void {
  expect(META.path).toBe("/v1/policy/meta");
  for (const exchange of [OPENED, CREATED, SENT, EXPLORED, CLOSED, FALLBACK, CREATED_HIGH, SENT_HIGH]) {
    expect(exchange.path).toBe("/v1/recommend");
    expect(exchange.status).toBe(200);
  }
  for (const state of DECISION_STATES) {
    for (const exchange of state.whatIfs) {
      expect(exchange.path).toBe("/v1/whatif");
      expect(exchange.status).toBe(200);
    }
  }
  expect(REJECTED.status).toBe(422);
}
sanity();

/** Walk a fresh session to each decision state, project every candidate
 * action through the console, and check that the first-ranked action's
 * projection is at least every alternative's within the standard errors. */
async function checkDecisionStates(factory: () => ConsoleSession): Promise<void> {
  for (const state of DECISION_STATES) {
    const session = factory();
    await session.start();
    await session.recordEvent("Create fine", D0, { amount: state.amount });
    if (state.sendFine) {
      await session.recordEvent("Send fine", "2021-03-11T09:00:00Z");
    }
    expect(session.recommendationRaw).toBe(state.recommend.response);

    const ranked = session.recommendation!.ranked;
    expect(ranked.length).toBe(state.whatIfs.length);
    const projections: WhatIfProjection[] = [];
    for (const [index, entry] of ranked.entries()) {
      const projection = await session.whatIf(entry.action);
      expect(session.projectionRaw).toBe(state.whatIfs[index]!.response);
      projections.push(projection!);
    }

    const top = projections[0]!;
    expect(top.action).toBe(ranked[0]!.action);
    for (const alt of projections.slice(1)) {
      expect(top.projected_kpi).toBeGreaterThanOrEqual(
        alt.projected_kpi - top.std_error - alt.std_error,
      );
    }
  }
}

function newSession(): ConsoleSession {
  return new ConsoleSession(new ServiceClient("", fixtureFetch(doc)), doc.scenario_id);
}

/** What the step must render, derived only from the response bytes. */
function expectedStepLines(entered: string | null, responseBody: string): string {
  const rec = JSON.parse(responseBody) as Recommendation;
  const lines = [entered ?? "> case opened", `state: ${rec.resolved_state.display}`];
  if (rec.fallback_used) {
    lines.push(FALLBACK_BADGE);
  }
  if (rec.terminal) {
    lines.push(`=== case complete — final KPI ${rec.kpi_so_far!.toFixed(4)} ===`);
  } else {
    lines.push(`KPI so far: ${rec.kpi_so_far!.toFixed(4)}`);
    rec.ranked.forEach((entry, index) => lines.push(renderRankedLine(index, entry)));
  }
  return lines.join("\n");
}

describe("golden transcript", () => {
  it("shows the policy fingerprint from the service metadata", async () => {
    const session = newSession();
    await session.start();
    expect(session.metaRaw).toBe(META.response);
    const fingerprint = (JSON.parse(META.response) as { policy: { fingerprint: string } })
      .policy.fingerprint;
    expect(renderMeta(session.meta!)).toContain(`policy fingerprint: ${fingerprint}`);
  });

  it("renders each step exactly as the service answered", async () => {
    const session = newSession();

    await session.start();
    expect(session.recommendationRaw).toBe(OPENED.response);
    let steps = session.transcript;
    expect(steps).toHaveLength(1);
    expect(renderStep(steps[0]!)).toBe(expectedStepLines(null, OPENED.response));
    expect(renderStep(steps[0]!)).toContain("state: <<start>>");
    expect(renderStep(steps[0]!)).toContain("1. Create fine-0  q=2.3664  support=1000");

    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    expect(session.recommendationRaw).toBe(CREATED.response);
    steps = session.transcript;
    expect(steps).toHaveLength(2);
    expect(renderStep(steps[1]!)).toBe(
      expectedStepLines(`> recorded Create fine @ ${D0}`, CREATED.response),
    );
    expect(renderStep(steps[1]!)).toContain("state: <Create fine, 0, low>");

    await session.recordEvent("Send fine", "2021-03-11T09:00:00Z");
    expect(session.recommendationRaw).toBe(SENT.response);
    steps = session.transcript;
    expect(steps).toHaveLength(3);
    expect(renderStep(steps[2]!)).toBe(
      expectedStepLines("> recorded Send fine @ 2021-03-11T09:00:00Z", SENT.response),
    );
    expect(renderStep(steps[2]!)).toContain("state: <Send fine, 0, low>");
    expect(renderStep(steps[2]!)).toMatch(/\n1\. Add penalty-1 {2}q=/);

    // No step so far needed a fallback match.
    expect(renderTranscript(steps)).not.toContain(FALLBACK_BADGE);
  });

  it("shows service-side projections; the recommended action tops them", async () => {
    const session = newSession();
    await session.start();
    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    const midway = await session.recordEvent("Send fine", "2021-03-11T09:00:00Z");

    const top = await session.whatIf(midway!.ranked[0]!.action);
    expect(session.projectionRaw).toBe(WHATIF_TOP.response);
    expect(renderProjection(top!)).toBe(renderProjection(parseProjection(WHATIF_TOP.response)));

    const alt = await session.whatIf(midway!.ranked[1]!.action);
    expect(session.projectionRaw).toBe(WHATIF_ALT.response);

    // The policy's first-ranked action projects at least as well as every
    // alternative, up to the displayed standard errors.
    const tolerance = top!.std_error + alt!.std_error;
    expect(top!.projected_kpi).toBeGreaterThanOrEqual(alt!.projected_kpi - tolerance);
  });

  it("ranks first the action whose projection tops every reachable decision state", async () => {
    await checkDecisionStates(newSession);
  });

  it("branches on what-if and restores the transcript unchanged", async () => {
    const session = newSession();
    await session.start();
    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    const midway = await session.recordEvent("Send fine", "2021-03-11T09:00:00Z");

    const savedTranscript = renderTranscript(session.transcript);
    const savedRaw = session.recommendationRaw;
    const savedHistory = session.history;

    await session.whatIf(midway!.ranked[0]!.action);
    await session.whatIf(midway!.ranked[1]!.action);
    expect(session.branchDepth).toBe(2);
    // What-if alone never touches the history or the transcript.
    expect(renderTranscript(session.transcript)).toBe(savedTranscript);

    // Explore the hypothetical continuation on the current branch.
    await session.recordEvent("Send for credit collection", D70);
    expect(session.recommendationRaw).toBe(EXPLORED.response);
    expect(session.history).toHaveLength(3);
    expect(renderTranscript(session.transcript)).toContain("final KPI 0.0000");

    // First restore: back to where the second what-if was taken, with the
    // first projection showing again.
    await session.restore();
    expect(renderTranscript(session.transcript)).toBe(savedTranscript);
    expect(session.recommendationRaw).toBe(savedRaw);
    expect(session.projectionRaw).toBe(WHATIF_TOP.response);
    expect(session.history).toEqual(savedHistory);
    expect(session.branchDepth).toBe(1);

    // Second restore: back to before any what-if.
    await session.restore();
    expect(renderTranscript(session.transcript)).toBe(savedTranscript);
    expect(session.recommendationRaw).toBe(savedRaw);
    expect(session.projectionRaw).toBeNull();
    expect(session.branchDepth).toBe(0);
  });

  it("closes the case with a terminal banner and the final KPI", async () => {
    const session = newSession();
    await session.start();
    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    await session.recordEvent("Send fine", "2021-03-11T09:00:00Z");
    await session.recordEvent("Payment", D25, { amount: 40.0 });

    expect(session.recommendationRaw).toBe(CLOSED.response);
    expect(session.isTerminal).toBe(true);
    expect(session.kpiSoFar).toBe(3.0);
    const lastStep = session.transcript[session.transcript.length - 1]!;
    expect(renderStep(lastStep)).toContain("=== case complete — final KPI 3.0000 ===");

    await expect(session.whatIf("Send fine-0")).rejects.toThrow(/what-if is unavailable/);
    await expect(session.recordEvent("Payment", D70)).rejects.toThrow(/has ended/);
  });

  it("flags histories the service could only match approximately", async () => {
    const session = newSession();
    await session.start();
    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    await session.recordEvent("Send fine", D70);

    expect(session.recommendationRaw).toBe(FALLBACK.response);
    expect(session.fallbackUsed).toBe(true);
    const lastStep = session.transcript[session.transcript.length - 1]!;
    expect(renderStep(lastStep)).toContain(FALLBACK_BADGE);
  });

  it("surfaces service rejections and keeps the history clean", async () => {
    const session = newSession();
    await session.start();
    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    const before = session.transcript.length;

    const attempt = session.recordEvent("Dance", "2021-03-02T09:00:00Z");
    await expect(attempt).rejects.toThrow(ServiceError);
    await expect(attempt).rejects.toThrow(/does not classify activity 'Dance'/);

    // The rejected entry never joined the history or the transcript.
    expect(session.history).toHaveLength(1);
    expect(session.transcript).toHaveLength(before);
    expect(session.recommendationRaw).toBe(CREATED.response);
  });
});

const LIVE_BASE = process.env["CONSOLE_SERVICE_URL"];

describe.skipIf(LIVE_BASE === undefined)("live service replay", () => {
  it("reproduces the recorded bytes end to end", async () => {
    const client = new ServiceClient(LIVE_BASE!);
    const session = new ConsoleSession(client, doc.scenario_id);

    await session.start();
    expect(session.metaRaw).toBe(META.response);
    expect(session.recommendationRaw).toBe(OPENED.response);

    await session.recordEvent("Create fine", D0, { amount: 40.0 });
    expect(session.recommendationRaw).toBe(CREATED.response);

    const midway = await session.recordEvent("Send fine", "2021-03-11T09:00:00Z");
    expect(session.recommendationRaw).toBe(SENT.response);

    const top = await session.whatIf(midway!.ranked[0]!.action);
    expect(session.projectionRaw).toBe(WHATIF_TOP.response);
    const alt = await session.whatIf(midway!.ranked[1]!.action);
    expect(session.projectionRaw).toBe(WHATIF_ALT.response);
    expect(top!.projected_kpi).toBeGreaterThanOrEqual(
      alt!.projected_kpi - top!.std_error - alt!.std_error,
    );

    await session.recordEvent("Send for credit collection", D70);
    expect(session.recommendationRaw).toBe(EXPLORED.response);
    await session.restore();
    await session.restore();
    expect(session.recommendationRaw).toBe(SENT.response);

    await session.recordEvent("Payment", D25, { amount: 40.0 });
    expect(session.recommendationRaw).toBe(CLOSED.response);
  });

  it("reproduces the recorded projections at every decision state", async () => {
    await checkDecisionStates(
      () => new ConsoleSession(new ServiceClient(LIVE_BASE!), doc.scenario_id),
    );
  });
});
