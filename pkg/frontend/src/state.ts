// Session view state: everything here is reconstructible from GET
// endpoints except the drafts the user is mid-typing, which are kept
// precisely so a re-render or a version conflict never drops them.

import type { Classification, Prompt, ProjectDoc, StaleEntry } from "./types.js";

export interface EvidenceDraft {
  text: string;
  resulting: Classification;
}

export class SessionState {
  projectId = "";
  version = 0;
  project: ProjectDoc | null = null;
  stale: StaleEntry[] = [];

  // wizard
  sourceObject = "";
  targetObject = "";
  includeCovered = false;
  wizardActive = false;
  prompts: Prompt[] = [];
  cursor = 0;

  // drafts that must survive re-renders and 409 replays
  wizardKeywords = "";
  wizardNarrative = "";
  rosterDraft = "";
  evidenceDrafts = new Map<string, EvidenceDraft>();

  // the input the user had in flight when a 409 arrived; the form keeps it
  // and this note explains why nothing was saved yet
  conflictNotice = "";

  // diagram layout cache: object id -> position, so existing hexagons do
  // not jump when new objects arrive
  layout = new Map<string, { cx: number; cy: number }>();

  currentPrompt(): Prompt | null {
    if (!this.prompts.length) return null;
    return this.prompts[Math.min(this.cursor, this.prompts.length - 1)];
  }

  openPaths() {
    // a presentation filter over fetched classifications, not a computation
    return (this.project?.paths ?? []).filter((p) => p.classification === "Plausible");
  }

  staleIds(): Set<string> {
    return new Set(this.stale.map((s) => s.id));
  }
}
