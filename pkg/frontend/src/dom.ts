/** Browser wiring: binds a ConsoleSession to the page.
 *
 * The page is a thin shell over the session — every panel is re-rendered
 * from session state after each operation, and all controls are disabled
 * while a request is running so only one operation is ever in flight.
 */
import { ServiceClient, ServiceError } from "./api.js";
import { ConsoleSession } from "./session.js";
import { renderMeta, renderProjection, renderTranscript } from "./transcript.js";
import type { Scalar } from "./types.js";

interface Panels {
  meta: HTMLElement;
  transcript: HTMLElement;
  actions: HTMLElement;
  projection: HTMLElement;
  status: HTMLElement;
  controls: HTMLFieldSetElement;
  activity: HTMLInputElement;
  timestamp: HTMLInputElement;
  payload: HTMLInputElement;
  recordButton: HTMLButtonElement;
  startButton: HTMLButtonElement;
  restoreButton: HTMLButtonElement;
}

function grab<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const element = root.querySelector(selector);
  if (element === null) {
    throw new Error(`missing element: ${selector}`);
  }
  return element as T;
}

function parsePayload(text: string): Record<string, Scalar> {
  const trimmed = text.trim();
  if (trimmed === "") {
    return {};
  }
  const parsed = JSON.parse(trimmed) as Record<string, Scalar>;
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error("event payload must be a JSON object");
  }
  return parsed;
}

export function mountConsole(
  root: ParentNode,
  client: ServiceClient,
  scenarioId: string,
): ConsoleSession {
  const session = new ConsoleSession(client, scenarioId);
  const panels: Panels = {
    meta: grab(root, "#meta"),
    transcript: grab(root, "#transcript"),
    actions: grab(root, "#actions"),
    projection: grab(root, "#projection"),
    status: grab(root, "#status"),
    controls: grab(root, "#controls"),
    activity: grab(root, "#activity"),
    timestamp: grab(root, "#timestamp"),
    payload: grab(root, "#payload"),
    recordButton: grab(root, "#record"),
    startButton: grab(root, "#start"),
    restoreButton: grab(root, "#restore"),
  };

  function repaint(): void {
    const meta = session.meta;
    panels.meta.textContent = meta === null ? "(no case open)" : renderMeta(meta);
    panels.transcript.textContent = renderTranscript(session.transcript);
    const projection = session.projection;
    panels.projection.textContent =
      projection === null ? "" : renderProjection(projection);
    panels.restoreButton.disabled = session.branchDepth === 0;
    panels.restoreButton.textContent =
      session.branchDepth === 0
        ? "restore branch"
        : `restore branch (${session.branchDepth} saved)`;
    paintActions();
  }

  function paintActions(): void {
    panels.actions.replaceChildren();
    const recommendation = session.recommendation;
    if (recommendation === null || recommendation.terminal) {
      return;
    }
    for (const entry of recommendation.ranked) {
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = `what-if ${entry.action}`;
      button.addEventListener("click", () => {
        void run(async () => {
          await session.whatIf(entry.action);
        });
      });
      panels.actions.append(button);
    }
  }

  async function run(work: () => Promise<void>): Promise<void> {
    panels.controls.disabled = true;
    panels.status.textContent = "…";
    try {
      await work();
      panels.status.textContent = "";
    } catch (error) {
      if (error instanceof ServiceError) {
        panels.status.textContent = `service: ${error.detail}`;
      } else {
        panels.status.textContent = String(error);
      }
    } finally {
      panels.controls.disabled = false;
      repaint();
    }
  }

  panels.startButton.addEventListener("click", () => {
    void run(async () => {
      await session.start();
    });
  });

  panels.recordButton.addEventListener("click", () => {
    void run(async () => {
      const activity = panels.activity.value.trim();
      const timestamp = panels.timestamp.value.trim();
      if (activity === "" || timestamp === "") {
        throw new Error("activity and timestamp are required");
      }
      await session.recordEvent(activity, timestamp, parsePayload(panels.payload.value));
      panels.activity.value = "";
      panels.payload.value = "";
    });
  });

  panels.restoreButton.addEventListener("click", () => {
    void run(async () => {
      await session.restore();
    });
  });

  repaint();
  return session;
}
