/** Client-side session state for one running case.
 *
 * The session owns the event history, the transcript of service responses,
 * and the what-if branch stack.  It never computes rankings, Q-values, or
 * state matching itself: every recommendation and projection it exposes is
 * the byte-exact body of a service response.
 *
 * Invariants:
 *   - the event history is append-only within a branch; an event only joins
 *     it together with the recommendation step it produced, so history and
 *     transcript always agree;
 *   - a what-if saves a snapshot of the whole session; restore() brings the
 *     saved branch back exactly;
 *   - state transitions are serialized through an internal queue, so two
 *     overlapping operations can never interleave their updates.
 */
import { ServiceClient } from "./api.js";
import type {
  CaseEvent,
  PolicyMeta,
  Recommendation,
  Scalar,
  WhatIfProjection,
} from "./types.js";
import { copyEvent, makeEvent } from "./types.js";

/** One row of the transcript: the event entered (null for the opening row)
 * and the exact bytes of the recommendation the service answered with. */
export interface TranscriptStep {
  entered: CaseEvent | null;
  recommendationRaw: string;
}

interface Snapshot {
  label: string;
  events: CaseEvent[];
  steps: TranscriptStep[];
  projectionRaw: string | null;
}

function copySteps(steps: readonly TranscriptStep[]): TranscriptStep[] {
  return steps.map((step) => ({
    entered: step.entered === null ? null : copyEvent(step.entered),
    recommendationRaw: step.recommendationRaw,
  }));
}

export class ConsoleSession {
  private events: CaseEvent[] = [];
  private steps: TranscriptStep[] = [];
  private stack: Snapshot[] = [];
  private projRaw: string | null = null;
  private metaRawBody: string | null = null;
  private started = false;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly client: ServiceClient,
    readonly scenarioId: string,
    readonly traceAttrs: Readonly<Record<string, Scalar>> = {},
  ) {}

  /** Serialize state transitions: each operation sees the state left behind
   * by the previous one, even when callers do not await in between. */
  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const run = this.queue.then(work);
    this.queue = run.then(
      () => undefined,
      () => undefined,
    );
    return run;
  }

  private ensureStarted(): void {
    if (!this.started) {
      throw new Error("no case is open; call start() first");
    }
  }

  /** Open the session: fetch policy metadata for the info panel, then the
   * empty-history recommendation.  Resets any previous case. */
  start(): Promise<Recommendation | null> {
    return this.enqueue(async () => {
      const meta = await this.client.policyMeta();
      if (!meta.stale) {
        this.metaRawBody = meta.raw;
      }
      const result = await this.client.recommend(this.scenarioId, [], this.traceAttrs);
      if (result.stale) {
        return null;
      }
      this.events = [];
      this.steps = [{ entered: null, recommendationRaw: result.raw! }];
      this.stack = [];
      this.projRaw = null;
      this.started = true;
      return result.value;
    });
  }

  /** Record one observed event and re-query the service.  The event and the
   * resulting transcript step are committed together, and only if the
   * service accepted the extended history. */
  recordEvent(
    activity: string,
    timestamp: string,
    payload: Record<string, Scalar> = {},
  ): Promise<Recommendation | null> {
    return this.enqueue(async () => {
      this.ensureStarted();
      if (this.isTerminal) {
        throw new Error("the case has ended; start a new case or restore a branch");
      }
      const event = makeEvent(activity, timestamp, payload);
      const next = [...this.events, event];
      const result = await this.client.recommend(this.scenarioId, next, this.traceAttrs);
      if (result.stale) {
        return null;
      }
      this.events = next;
      this.steps = [...this.steps, { entered: event, recommendationRaw: result.raw! }];
      this.projRaw = null;
      return result.value;
    });
  }

  /** Ask the service what forcing `action` now would yield.  Saves the
   * current session onto the branch stack first, so the operator can explore
   * the hypothetical continuation and come back with restore(). */
  whatIf(
    action: string,
    options: { nCases?: number; seed?: number } = {},
  ): Promise<WhatIfProjection | null> {
    return this.enqueue(async () => {
      this.ensureStarted();
      if (this.isTerminal) {
        throw new Error("what-if is unavailable: the execution has ended");
      }
      const snapshot: Snapshot = {
        label: `what-if ${action}`,
        events: this.events.map(copyEvent),
        steps: copySteps(this.steps),
        projectionRaw: this.projRaw,
      };
      const result = await this.client.whatIf(
        this.scenarioId,
        this.events,
        this.traceAttrs,
        action,
        options,
      );
      if (result.stale) {
        return null;
      }
      this.stack = [...this.stack, snapshot];
      this.projRaw = result.raw;
      return result.value;
    });
  }

  /** Return to the most recently saved branch, restoring the session exactly
   * as it was when the what-if was taken. */
  restore(): Promise<void> {
    return this.enqueue(async () => {
      const snapshot = this.stack[this.stack.length - 1];
      if (snapshot === undefined) {
        throw new Error("no saved branch to restore");
      }
      this.stack = this.stack.slice(0, -1);
      this.events = snapshot.events.map(copyEvent);
      this.steps = copySteps(snapshot.steps);
      this.projRaw = snapshot.projectionRaw;
    });
  }

  /** Events recorded on the current branch, oldest first. */
  get history(): readonly CaseEvent[] {
    return this.events.map(copyEvent);
  }

  /** Transcript rows of the current branch, oldest first. */
  get transcript(): readonly TranscriptStep[] {
    return copySteps(this.steps);
  }

  /** Saved branch labels, oldest first. */
  get branches(): readonly string[] {
    return this.stack.map((snapshot) => snapshot.label);
  }

  get branchDepth(): number {
    return this.stack.length;
  }

  /** Exact bytes of the latest recommendation response, if any. */
  get recommendationRaw(): string | null {
    const last = this.steps[this.steps.length - 1];
    return last === undefined ? null : last.recommendationRaw;
  }

  get recommendation(): Recommendation | null {
    const raw = this.recommendationRaw;
    return raw === null ? null : (JSON.parse(raw) as Recommendation);
  }

  /** Exact bytes of the latest what-if projection, if one is showing. */
  get projectionRaw(): string | null {
    return this.projRaw;
  }

  get projection(): WhatIfProjection | null {
    return this.projRaw === null ? null : (JSON.parse(this.projRaw) as WhatIfProjection);
  }

  get metaRaw(): string | null {
    return this.metaRawBody;
  }

  get meta(): PolicyMeta | null {
    return this.metaRawBody === null ? null : (JSON.parse(this.metaRawBody) as PolicyMeta);
  }

  get isTerminal(): boolean {
    return this.recommendation?.terminal ?? false;
  }

  get fallbackUsed(): boolean {
    return this.recommendation?.fallback_used ?? false;
  }

  get kpiSoFar(): number | null {
    return this.recommendation?.kpi_so_far ?? null;
  }
}
