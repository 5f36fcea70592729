// Thin typed client over fetch. Every mutation carries the caller's
// last-seen version as If-Match; a 409 surfaces as ApiError with the
// service's current version so the caller can refetch and replay.

import type {
  Classification,
  CoverageResponse,
  EndpointDoc,
  GapsResponse,
  MutationResponse,
  Phase,
  ProjectEnvelope,
  ProjectSummary,
  StaleResponse,
  SuggestResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorName: string,
    message: string,
    readonly currentVersion?: number,
  ) {
    super(message);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function parse<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let name = `HTTP${response.status}`;
  let message = response.statusText;
  let version: number | undefined;
  try {
    const body = await response.json();
    if (typeof body.error === "string") name = body.error;
    if (typeof body.message === "string") message = body.message;
    if (typeof body.version === "number") version = body.version;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, name, message, version);
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string, params?: Record<string, string>): string {
    const u = new URL(this.baseUrl.replace(/\/$/, "") + path, "http://placeholder.invalid");
    for (const [k, v] of Object.entries(params ?? {})) u.searchParams.set(k, v);
    return this.baseUrl.startsWith("http")
      ? u.toString().replace("http://placeholder.invalid", "")
      : u.pathname + u.search;
  }

  private async get<T>(path: string, params?: Record<string, string>): Promise<T> {
    return parse<T>(await fetch(this.url(path, params)));
  }

  private async post<T>(path: string, body: unknown, version?: number): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (version !== undefined) headers["If-Match"] = String(version);
    return parse<T>(
      await fetch(this.url(path), {
        method: "POST",
        headers,
        body: JSON.stringify(body),
      }),
    );
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.get("/projects");
  }

  getProject(id: string): Promise<ProjectEnvelope> {
    return this.get(`/projects/${id}`);
  }

  suggest(
    id: string,
    source: string,
    target: string,
    includeCovered: boolean,
  ): Promise<SuggestResponse> {
    return this.get(`/projects/${id}/suggest`, {
      source,
      target,
      include_covered: String(includeCovered),
    });
  }

  stale(id: string): Promise<StaleResponse> {
    return this.get(`/projects/${id}/stale`);
  }

  coverage(id: string, views?: string): Promise<CoverageResponse> {
    return this.get(`/projects/${id}/coverage`, views ? { views } : undefined);
  }

  gaps(id: string): Promise<GapsResponse> {
    return this.get(`/projects/${id}/gaps`);
  }

  addObject(
    id: string,
    version: number,
    body: { name: string; description?: string; author?: string },
  ): Promise<MutationResponse> {
    return this.post(`/projects/${id}/objects`, body, version);
  }

  addPath(
    id: string,
    version: number,
    body: {
      source: EndpointDoc;
      target: EndpointDoc;
      keywords: string[];
      narrative: string;
      classification: Classification;
      author?: string;
    },
  ): Promise<MutationResponse> {
    return this.post(`/projects/${id}/paths`, body, version);
  }

  addEvidence(
    id: string,
    version: number,
    pathId: string,
    body: { text: string; resulting: Classification; phase?: Phase; author?: string },
  ): Promise<MutationResponse> {
    return this.post(`/projects/${id}/paths/${pathId}/evidence`, body, version);
  }

  advancePhase(id: string, version: number, phase: Phase, author?: string): Promise<MutationResponse> {
    return this.post(`/projects/${id}/phase`, { phase, author }, version);
  }
}
