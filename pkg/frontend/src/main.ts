/**
 * Entry point for the browser bundle. The backing service address can be
 * overridden with ?service=http://host:port for development against a
 * non-default port.
 */

import { StudioClient } from "./api.js";
import { StudioApp } from "./dom.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("service") ?? "http://127.0.0.1:8321";
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
new StudioApp({ client: new StudioClient(base), root });
