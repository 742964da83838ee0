/** Page entry point.
 *
 * The service base URL and scenario come from query parameters so the same
 * page can sit in front of any running instance:
 *   index.html?service=http://127.0.0.1:8911&scenario=fines
 */
import { ServiceClient } from "./api.js";
import { mountConsole } from "./dom.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8911";
const scenario = params.get("scenario") ?? "fines";

mountConsole(document, new ServiceClient(base), scenario);
