// Wire types of the hotpie HTTP service. The UI renders these verbatim and
// never derives domain facts itself.

export type Factor =
  | "Human"
  | "Organisation"
  | "Technology"
  | "Process"
  | "Information"
  | "Environment";

export const FACTORS: Factor[] = [
  "Human",
  "Organisation",
  "Technology",
  "Process",
  "Information",
  "Environment",
];

export type Classification = "Definite" | "Plausible" | "Discharged";
export type Phase = "Design" | "Acquisition" | "Validation" | "Deployment" | "Operation";

export const PHASES: Phase[] = [
  "Design",
  "Acquisition",
  "Validation",
  "Deployment",
  "Operation",
];

export interface EndpointDoc {
  object: string;
  primary: Factor;
  secondary: string | null;
}

export interface EvidenceDoc {
  timestamp: string;
  phase: Phase;
  author: string;
  text: string;
  resulting_classification: Classification;
}

export interface PathDoc {
  id: string;
  source: EndpointDoc;
  target: EndpointDoc;
  keywords: string[];
  narrative: string;
  classification: Classification;
  initial_classification: Classification;
  created_phase: Phase;
  evidence: EvidenceDoc[];
}

export interface ObjectDoc {
  id: string;
  name: string;
  description: string;
  abstraction: "Macro" | "Micro";
  tags: string[];
}

export interface ProjectDoc {
  schema_version: string;
  id: string;
  name: string;
  current_phase: Phase;
  metadata: Record<string, unknown>;
  objects: ObjectDoc[];
  paths: PathDoc[];
  event_log: { timestamp: string; actor: string; action: string }[];
}

export interface ProjectEnvelope {
  project: ProjectDoc;
  version: number;
}

export interface ProjectSummary {
  id: string;
  name: string;
  current_phase: Phase;
  objects: number;
  paths: number;
  version: number;
}

export interface Prompt {
  source_object: string;
  target_object: string;
  source_factor: Factor;
  target_factor: Factor;
  covered: boolean;
  templates: string[];
}

export interface SuggestResponse {
  prompts: Prompt[];
  version: number;
}

export interface StaleEntry {
  id: string;
  latest_phase: Phase;
}

export interface StaleResponse {
  stale: StaleEntry[];
  version: number;
}

export interface CoverageRow {
  view_id: string;
  title: string;
  levels: Record<Factor, string>;
  notes: Record<string, string>;
}

export interface CoverageResponse {
  rows: CoverageRow[];
  merged: Record<Factor, string>;
  version: number;
}

export interface GapsResponse {
  gaps: { factor: Factor; merged_level: string }[];
  version: number;
}

export interface MutationResponse {
  version: number;
  id?: string;
  classification?: Classification;
  current_phase?: Phase;
  off_catalog_keywords?: string[];
}
