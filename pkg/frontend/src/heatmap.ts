// Coverage heatmap: factors x view profiles, merged row highlighted.

import { clear, el } from "./dom.js";
import type { CoverageResponse, Factor } from "./types.js";
import { FACTORS } from "./types.js";

const LEVEL_CLASS: Record<string, string> = {
  Represented: "cov-full",
  PartiallyRepresented: "cov-partial",
  NotRepresented: "cov-none",
};

const LEVEL_SHORT: Record<string, string> = {
  Represented: "R",
  PartiallyRepresented: "P",
  NotRepresented: "N",
};

function cell(level: string): HTMLElement {
  return el("td", { class: `cov-cell ${LEVEL_CLASS[level] ?? ""}` }, [LEVEL_SHORT[level] ?? "?"]);
}

export function renderHeatmap(
  container: Element,
  coverage: CoverageResponse | null,
  gaps: { factor: Factor; merged_level: string }[],
): void {
  clear(container);
  container.append(el("h2", {}, ["View coverage"]));
  if (!coverage) {
    container.append(el("p", {}, ["No view profiles loaded."]));
    return;
  }
  const table = el("table", { class: "heatmap" });
  const head = el("tr", {}, [el("th", {}, ["View"])]);
  for (const factor of FACTORS) head.append(el("th", {}, [factor[0]]));
  table.append(head);
  for (const row of coverage.rows) {
    const tr = el("tr", { class: "view-row" }, [el("td", {}, [row.view_id])]);
    for (const factor of FACTORS) tr.append(cell(row.levels[factor]));
    table.append(tr);
  }
  const merged = el("tr", { class: "merged-row" }, [el("td", {}, ["MERGED"])]);
  for (const factor of FACTORS) merged.append(cell(coverage.merged[factor]));
  table.append(merged);
  container.append(table);

  const gapList = el("ul", { class: "gap-list" });
  for (const gap of gaps) {
    gapList.append(el("li", { class: "gap-item" }, [`${gap.factor}: ${gap.merged_level}`]));
  }
  container.append(el("h3", {}, ["Gaps"]), gapList);
}
