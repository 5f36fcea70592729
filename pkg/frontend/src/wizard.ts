// Suggestion wizard: pick two objects, then walk the unexplored factor
// pairs one prompt at a time, recording each as Definite or Plausible (or
// skipping it). The prompt list, cursor and draft inputs all live in the
// session state, so a re-render (or a 409 replay) never loses typed input.

import { clear, el } from "./dom.js";
import type { SessionBoard } from "./board.js";

export function renderWizard(container: Element, board: SessionBoard): void {
  clear(container);
  const state = board.state;
  container.append(el("h2", {}, ["Suggestion wizard"]));

  const objects = state.project?.objects ?? [];
  const sourceSelect = el("select", { class: "wizard-source" });
  const targetSelect = el("select", { class: "wizard-target" });
  for (const select of [sourceSelect, targetSelect]) {
    select.append(el("option", { value: "" }, ["- pick object -"]));
    for (const obj of objects) {
      select.append(el("option", { value: obj.id }, [obj.name]));
    }
  }
  sourceSelect.value = state.sourceObject;
  targetSelect.value = state.targetObject;
  sourceSelect.addEventListener("change", () => {
    state.sourceObject = sourceSelect.value;
  });
  targetSelect.addEventListener("change", () => {
    state.targetObject = targetSelect.value;
  });

  const coveredToggle = el("input", { type: "checkbox", class: "wizard-covered" });
  coveredToggle.checked = state.includeCovered;
  coveredToggle.addEventListener("change", () => {
    state.includeCovered = coveredToggle.checked;
  });

  const start = el("button", { class: "wizard-start", type: "button" }, ["Walk prompts"]);
  start.addEventListener("click", () => {
    board.track(board.startWizard());
  });

  container.append(
    el("div", { class: "wizard-setup" }, [
      sourceSelect,
      el("span", {}, [" → "]),
      targetSelect,
      el("label", { class: "wizard-covered-label" }, [coveredToggle, " include covered"]),
      start,
    ]),
  );

  const prompt = state.currentPrompt();
  if (!state.wizardActive || !prompt) {
    return;
  }

  const body = el("div", { class: "wizard-body" });
  body.append(
    el("div", { class: "wizard-cursor" }, [
      `${Math.min(state.cursor, state.prompts.length - 1) + 1} of ${state.prompts.length}`,
    ]),
    el("div", { class: "wizard-pair" }, [
      `${prompt.source_factor} → ${prompt.target_factor}`,
      prompt.covered ? el("span", { class: "covered-marker" }, [" (covered)"]) : "",
    ]),
    el("div", { class: "wizard-templates" }, [
      prompt.templates.length
        ? `Catalog keywords: ${prompt.templates.slice(0, 10).join(", ")}` +
          (prompt.templates.length > 10 ? ", …" : "")
        : "No catalog keywords for this factor.",
    ]),
  );

  const keywords = el("input", {
    class: "wizard-keywords",
    placeholder: "keywords, comma separated",
    value: state.wizardKeywords,
  });
  keywords.addEventListener("input", () => {
    state.wizardKeywords = keywords.value;
  });
  const narrative = el("textarea", { class: "wizard-narrative", placeholder: "narrative" });
  narrative.value = state.wizardNarrative;
  narrative.addEventListener("input", () => {
    state.wizardNarrative = narrative.value;
  });

  const definite = el("button", { class: "wizard-definite", type: "button" }, ["Record Definite"]);
  definite.addEventListener("click", () => {
    board.track(board.recordPrompt("Definite"));
  });
  const plausible = el("button", { class: "wizard-plausible", type: "button" }, [
    "Record Plausible",
  ]);
  plausible.addEventListener("click", () => {
    board.track(board.recordPrompt("Plausible"));
  });
  const skip = el("button", { class: "wizard-skip", type: "button" }, ["Skip"]);
  skip.addEventListener("click", () => {
    state.cursor = state.prompts.length ? (state.cursor + 1) % state.prompts.length : 0;
    board.renderAll();
  });

  body.append(keywords, narrative, el("div", { class: "wizard-actions" }, [definite, plausible, skip]));
  container.append(body);
}
