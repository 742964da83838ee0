/** Shared test plumbing: the recorded transcript and fake fetch builders. */
import { readFileSync } from "node:fs";

import type { FetchLike } from "../src/api.js";
import type { Recommendation } from "../src/types.js";

export interface Exchange {
  method: string;
  path: string;
  request: string | null;
  status: number;
  response: string;
}

export interface TranscriptDoc {
  base: string;
  scenario_id: string;
  recipe: string[];
  exchanges: Exchange[];
}

export function loadTranscript(): TranscriptDoc {
  const url = new URL("./fixtures/transcript.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as TranscriptDoc;
}

function keyOf(method: string, pathWithBody: string): string {
  return `${method} ${pathWithBody}`;
}

/** A fetch that only answers requests recorded in the transcript, byte for
 * byte.  Any request the live session did not make fails the test, so a
 * passing run proves the session reproduces the recorded exchanges exactly.
 *
 * Use it with `new ServiceClient("", fixtureFetch(doc))` so the URL the
 * client builds is just the path.
 */
export function fixtureFetch(doc: TranscriptDoc): FetchLike {
  const map = new Map<string, Exchange>();
  for (const exchange of doc.exchanges) {
    const key = keyOf(exchange.method, `${exchange.path} ${exchange.request ?? ""}`);
    const prior = map.get(key);
    if (
      prior !== undefined &&
      (prior.status !== exchange.status || prior.response !== exchange.response)
    ) {
      throw new Error(`conflicting recorded responses for ${key}`);
    }
    map.set(key, exchange);
  }
  return async (url, init) => {
    const key = keyOf(init.method, `${url} ${init.body ?? ""}`);
    const hit = map.get(key);
    if (hit === undefined) {
      throw new Error(`request not in the recorded transcript: ${key}`);
    }
    return { status: hit.status, text: async () => hit.response };
  };
}

/** Minimal well-formed recommendation body for handcrafted fakes. */
export function makeRecommendation(
  overrides: Partial<Recommendation> = {},
): Recommendation {
  return {
    scenario_id: "fines",
    resolved_state: { la: "X", hf: [0], ef: ["low"], terminal: false, display: "<X, 0, low>" },
    fallback_used: false,
    terminal: false,
    ranked: [],
    kpi_so_far: 0.0,
    ...overrides,
  };
}
