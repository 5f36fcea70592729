// Entry point: mount the session board against a service base URL.
// Configure with ?api=http://host:port and ?project=<id> query parameters.

import { ApiClient } from "./api.js";
import { SessionBoard } from "./board.js";
import { el } from "./dom.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";
  const api = new ApiClient(baseUrl);
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  const requested = params.get("project");
  let projectId = requested;
  if (!projectId) {
    const projects = await api.listProjects();
    if (!projects.length) {
      root.append(
        el("p", {}, [
          `No projects in the store at ${baseUrl}. ` +
            "Create one with the CLI (hotpie init) or POST /projects.",
        ]),
      );
      return;
    }
    projectId = projects[0].id;
  }

  const board = new SessionBoard(root, api, {
    author: params.get("author") ?? "scribe",
    pollMs: 5000,
  });
  await board.open(projectId);
}

boot().catch((error) => {
  const root = document.getElementById("app");
  if (root) root.append(el("pre", { class: "boot-error" }, [String(error)]));
});
