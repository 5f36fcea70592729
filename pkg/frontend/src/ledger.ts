// Uncertainty ledger: the open (Plausible) paths with stale markers and a
// one-click evidence form per entry. Per-path drafts survive re-renders and
// version conflicts.

import { clear, el } from "./dom.js";
import type { SessionBoard } from "./board.js";
import type { Classification } from "./types.js";

const RESULTING: Classification[] = ["Definite", "Plausible", "Discharged"];

export function renderLedger(container: Element, board: SessionBoard): void {
  clear(container);
  const state = board.state;
  const open = state.openPaths();
  const staleIds = state.staleIds();

  container.append(el("h2", {}, [`Open uncertainties (${open.length})`]));
  const list = el("ul", { class: "ledger-list" });
  for (const path of open) {
    const draft = state.evidenceDrafts.get(path.id) ?? { text: "", resulting: "Discharged" as Classification };
    const label = el("span", { class: "ledger-label" }, [
      `${path.id}: ${path.source.object}/${path.source.primary} → ` +
        `${path.target.object}/${path.target.primary}` +
        (path.keywords.length ? ` [${path.keywords.join(", ")}]` : ""),
    ]);
    const item = el("li", { class: "ledger-item", "data-path-id": path.id }, [label]);
    if (staleIds.has(path.id)) {
      item.append(el("span", { class: "stale-marker" }, [" stale"]));
    }

    const text = el("input", {
      class: "evidence-text",
      placeholder: "new information",
      value: draft.text,
    });
    text.addEventListener("input", () => {
      state.evidenceDrafts.set(path.id, { ...draft, text: text.value });
    });
    const resulting = el("select", { class: "evidence-resulting" });
    for (const option of RESULTING) {
      resulting.append(el("option", { value: option }, [option]));
    }
    resulting.value = draft.resulting;
    resulting.addEventListener("change", () => {
      state.evidenceDrafts.set(path.id, {
        ...state.evidenceDrafts.get(path.id) ?? draft,
        resulting: resulting.value as Classification,
      });
    });
    const record = el("button", { class: "evidence-record", type: "button" }, ["Record"]);
    record.addEventListener("click", () => {
      board.track(board.recordEvidence(path.id));
    });
    item.append(el("span", { class: "evidence-form" }, [text, resulting, record]));
    list.append(item);
  }
  container.append(list);
  if (!open.length) {
    container.append(el("p", { class: "ledger-empty" }, ["Nothing open. Walk the wizard."]));
  }
}
