/** HTTP client for the recommendation service.
 *
 * All access goes through one request chain: at most one request is in
 * flight at a time, later calls wait for earlier ones.  Every call gets a
 * sequence number when it is issued; if newer calls were issued by the time
 * a response arrives, that response is marked stale and its payload is
 * withheld so callers cannot apply it over fresher data.
 */
import type {
  CaseEvent,
  HealthStatus,
  PolicyMeta,
  Recommendation,
  Scalar,
  WhatIfProjection,
} from "./types.js";

/** Minimal slice of the fetch API the client needs; injectable for tests. */
export interface FetchInit {
  method: string;
  headers?: Record<string, string>;
  body?: string;
}

export interface FetchResponseLike {
  status: number;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init: FetchInit) => Promise<FetchResponseLike>;

/** Non-2xx response from the service, with its diagnostic detail. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`service returned ${status}: ${detail}`);
    this.name = "ServiceError";
  }
}

/** Outcome of one call: the exact response bytes plus staleness bookkeeping.
 *
 * `value` and `raw` are null when (and only when) the response is stale.
 */
export interface ServiceResult<T> {
  seq: number;
  stale: boolean;
  value: T | null;
  raw: string | null;
}

export interface WhatIfOptions {
  nCases?: number;
  seed?: number;
}

function extractDetail(body: string): string {
  try {
    const parsed = JSON.parse(body) as { detail?: unknown };
    if (typeof parsed.detail === "string") {
      return parsed.detail;
    }
    return JSON.stringify(parsed.detail);
  } catch {
    return body;
  }
}

export class ServiceClient {
  private chain: Promise<unknown> = Promise.resolve();
  private issued = 0;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  /** Sequence number of the most recently issued request. */
  get lastIssued(): number {
    return this.issued;
  }

  private exchange<T>(
    method: string,
    path: string,
    body: string | null,
  ): Promise<ServiceResult<T>> {
    const seq = ++this.issued;
    const run = this.chain.then(async (): Promise<ServiceResult<T>> => {
      const init: FetchInit = { method };
      if (body !== null) {
        init.headers = { "content-type": "application/json" };
        init.body = body;
      }
      const response = await this.fetchImpl(this.baseUrl + path, init);
      const text = await response.text();
      if (seq !== this.issued) {
        // A newer request was issued while this one was travelling; whatever
        // it says no longer describes the current session state.
        return { seq, stale: true, value: null, raw: null };
      }
      if (response.status < 200 || response.status >= 300) {
        throw new ServiceError(response.status, extractDetail(text));
      }
      return { seq, stale: false, value: JSON.parse(text) as T, raw: text };
    });
    // Keep the chain alive whether this call succeeds or fails.
    this.chain = run.then(
      () => undefined,
      () => undefined,
    );
    return run;
  }

  health(): Promise<ServiceResult<HealthStatus>> {
    return this.exchange("GET", "/v1/health", null);
  }

  policyMeta(): Promise<ServiceResult<PolicyMeta>> {
    return this.exchange("GET", "/v1/policy/meta", null);
  }

  recommend(
    scenarioId: string,
    events: readonly CaseEvent[],
    traceAttrs: Readonly<Record<string, Scalar>>,
  ): Promise<ServiceResult<Recommendation>> {
    const body = JSON.stringify({
      scenario_id: scenarioId,
      events,
      trace_attrs: traceAttrs,
    });
    return this.exchange("POST", "/v1/recommend", body);
  }

  whatIf(
    scenarioId: string,
    events: readonly CaseEvent[],
    traceAttrs: Readonly<Record<string, Scalar>>,
    action: string,
    options: WhatIfOptions = {},
  ): Promise<ServiceResult<WhatIfProjection>> {
    const payload: Record<string, unknown> = {
      scenario_id: scenarioId,
      events,
      trace_attrs: traceAttrs,
      action,
    };
    if (options.nCases !== undefined) {
      payload["n_cases"] = options.nCases;
    }
    if (options.seed !== undefined) {
      payload["seed"] = options.seed;
    }
    return this.exchange("POST", "/v1/whatif", JSON.stringify(payload));
  }
}
