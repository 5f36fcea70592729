// Session board: composes the panels and owns every service interaction.
// All domain answers (classifications, prompts, coverage, gaps, staleness)
// come from the service; the board only renders and routes input.
//
// Concurrency: each mutation sends the last-seen version. On 409 the board
// refetches the project, keeps the user's drafts in place, and shows a
// conflict notice asking them to review and resubmit — pending input is
// never dropped silently.

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import { renderDiagram } from "./hexagon.js";
import { renderHeatmap } from "./heatmap.js";
import { renderLedger } from "./ledger.js";
import { renderRoster } from "./roster.js";
import { SessionState } from "./state.js";
import type { Classification, CoverageResponse, Factor, GapsResponse } from "./types.js";
import { renderWizard } from "./wizard.js";

export interface BoardOptions {
  author?: string;
  pollMs?: number;
}

export class SessionBoard {
  readonly state = new SessionState();
  pending: Promise<void> = Promise.resolve();

  private coverage: CoverageResponse | null = null;
  private gaps: GapsResponse | null = null;
  private readonly author: string;
  private readonly sections: Record<string, HTMLElement>;
  private pollHandle: ReturnType<typeof setInterval> | null = null;

  constructor(
    root: Element,
    private readonly api: ApiClient,
    options: BoardOptions = {},
  ) {
    this.author = options.author ?? "scribe";
    clear(root);
    this.sections = {
      header: el("header", { class: "board-header" }),
      notice: el("div", { class: "conflict-notice", hidden: "hidden" }),
      roster: el("section", { class: "panel roster" }),
      diagram: el("section", { class: "panel diagram" }),
      wizard: el("section", { class: "panel wizard" }),
      ledger: el("section", { class: "panel ledger" }),
      heatmap: el("section", { class: "panel heatmap" }),
    };
    for (const section of Object.values(this.sections)) root.append(section);
    if (options.pollMs && options.pollMs > 0) {
      this.pollHandle = setInterval(() => this.track(this.refreshAll()), options.pollMs);
    }
  }

  dispose(): void {
    if (this.pollHandle !== null) clearInterval(this.pollHandle);
  }

  /** Remember an in-flight handler so tests (and callers) can await it. */
  track(work: Promise<void>): void {
    this.pending = work.catch((error) => {
      this.state.conflictNotice = error instanceof Error ? error.message : String(error);
      this.renderAll();
    });
  }

  async open(projectId: string): Promise<void> {
    this.state.projectId = projectId;
    await this.refreshAll();
  }

  async refreshAll(): Promise<void> {
    const id = this.state.projectId;
    const envelope = await this.api.getProject(id);
    this.state.project = envelope.project;
    this.state.version = envelope.version;
    this.state.stale = (await this.api.stale(id)).stale;
    this.coverage = await this.api.coverage(id);
    this.gaps = await this.api.gaps(id);
    if (this.state.wizardActive && this.state.sourceObject && this.state.targetObject) {
      await this.refreshPrompts();
    }
    this.renderAll();
  }

  private async refreshPrompts(): Promise<void> {
    const { projectId, sourceObject, targetObject, includeCovered } = this.state;
    const response = await this.api.suggest(projectId, sourceObject, targetObject, includeCovered);
    this.state.prompts = response.prompts;
    if (this.state.cursor >= response.prompts.length) this.state.cursor = 0;
  }

  async startWizard(): Promise<void> {
    if (!this.state.sourceObject || !this.state.targetObject) {
      this.state.conflictNotice = "Pick two distinct objects first.";
      this.renderAll();
      return;
    }
    this.state.wizardActive = true;
    this.state.cursor = 0;
    await this.refreshPrompts();
    this.renderAll();
  }

  async recordPrompt(classification: Classification): Promise<void> {
    const prompt = this.state.currentPrompt();
    if (!prompt) return;
    const keywords = this.state.wizardKeywords
      .split(",")
      .map((k) => k.trim())
      .filter(Boolean);
    await this.mutate(async () => {
      const response = await this.api.addPath(this.state.projectId, this.state.version, {
        source: { object: prompt.source_object, primary: prompt.source_factor, secondary: null },
        target: { object: prompt.target_object, primary: prompt.target_factor, secondary: null },
        keywords,
        narrative: this.state.wizardNarrative,
        classification,
        author: this.author,
      });
      this.state.version = response.version;
      this.state.wizardKeywords = "";
      this.state.wizardNarrative = "";
    });
  }

  async recordEvidence(pathId: string): Promise<void> {
    const draft = this.state.evidenceDrafts.get(pathId);
    if (!draft || !draft.text.trim()) {
      this.state.conflictNotice = "Evidence text is required.";
      this.renderAll();
      return;
    }
    await this.mutate(async () => {
      const response = await this.api.addEvidence(
        this.state.projectId,
        this.state.version,
        pathId,
        { text: draft.text, resulting: draft.resulting, author: this.author },
      );
      this.state.version = response.version;
      this.state.evidenceDrafts.delete(pathId);
    });
  }

  async addObject(name: string): Promise<void> {
    if (!name.trim()) return;
    await this.mutate(async () => {
      const response = await this.api.addObject(this.state.projectId, this.state.version, {
        name,
        author: this.author,
      });
      this.state.version = response.version;
      this.state.rosterDraft = "";
    });
  }

  /** Run a mutation; on version conflict refetch and keep drafts for replay. */
  private async mutate(work: () => Promise<void>): Promise<void> {
    try {
      await work();
      this.state.conflictNotice = "";
      await this.refreshAll();
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.state.conflictNotice =
          `The project changed under you (now version ${error.currentVersion}). ` +
          "Your input is still in the form - review and resubmit.";
        await this.refreshAll();
        return;
      }
      if (error instanceof ApiError) {
        this.state.conflictNotice = `${error.errorName}: ${error.message}`;
        this.renderAll();
        return;
      }
      throw error;
    }
  }

  renderAll(): void {
    const { project } = this.state;
    clear(this.sections.header);
    if (project) {
      this.sections.header.append(
        el("h1", {}, [project.name]),
        el("span", { class: "phase-badge" }, [project.current_phase]),
        el("span", { class: "version-badge" }, [`v${this.state.version}`]),
      );
    }
    const notice = this.sections.notice;
    clear(notice);
    if (this.state.conflictNotice) {
      notice.removeAttribute("hidden");
      notice.append(this.state.conflictNotice);
    } else {
      notice.setAttribute("hidden", "hidden");
    }
    renderRoster(this.sections.roster, this);
    if (project) renderDiagram(this.sections.diagram, project, this.state.layout);
    renderWizard(this.sections.wizard, this);
    renderLedger(this.sections.ledger, this);
    renderHeatmap(
      this.sections.heatmap,
      this.coverage,
      this.gaps?.gaps ?? ([] as { factor: Factor; merged_level: string }[]),
    );
  }
}
