// Object roster panel: list every system object, add new ones live.

import { clear, el } from "./dom.js";
import type { SessionBoard } from "./board.js";

export function renderRoster(container: Element, board: SessionBoard): void {
  clear(container);
  const state = board.state;
  container.append(el("h2", {}, ["Objects"]));
  const list = el("ul", { class: "roster-list" });
  for (const obj of state.project?.objects ?? []) {
    list.append(
      el("li", { class: "roster-item", "data-object-id": obj.id }, [
        el("span", { class: "roster-name" }, [obj.name]),
        el("span", { class: "roster-id" }, [` (${obj.id})`]),
      ]),
    );
  }
  container.append(list);

  const input = el("input", {
    class: "roster-input",
    placeholder: "new object name",
    value: state.rosterDraft,
  });
  input.addEventListener("input", () => {
    state.rosterDraft = input.value;
  });
  const button = el("button", { class: "roster-add", type: "button" }, ["Add object"]);
  button.addEventListener("click", () => {
    board.track(board.addObject(input.value));
  });
  container.append(el("div", { class: "roster-form" }, [input, button]));
}
