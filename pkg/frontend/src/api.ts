// Typed client over the formationkit HTTP API.
//
// Every request is appended to `log`, which the tests (and the
// viewing-mode guard) use to assert that read-only interactions never
// issue mutating calls.

import type {
  AssessmentTimeline,
  ChoreographyDoc,
  ChoreographyListing,
  CollisionsPayload,
  DeviationSampleDoc,
  DistancesPayload,
  HeatmapPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface RequestLogEntry {
  method: string;
  path: string;
}

export class RevisionConflictError extends Error {
  constructor(public currentRevision: number) {
    super(`document changed on the server (revision ${currentRevision})`);
  }
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function fail(response: Response): Promise<never> {
  let code = "UNKNOWN";
  let message = response.statusText;
  try {
    const body = await response.json();
    code = body?.error?.code ?? code;
    message = body?.error?.message ?? message;
    if (response.status === 409) {
      throw new RevisionConflictError(body?.current_revision ?? -1);
    }
  } catch (err) {
    if (err instanceof RevisionConflictError) throw err;
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  readonly log: RequestLogEntry[] = [];

  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    this.log.push({ method, path });
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "content-type": "application/json" };
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) await fail(response);
    return response;
  }

  mutatingRequests(): RequestLogEntry[] {
    return this.log.filter((r) => r.method !== "GET");
  }

  async listChoreographies(): Promise<ChoreographyListing[]> {
    const response = await this.request("GET", "/choreographies");
    return (await response.json()).choreographies;
  }

  async getChoreography(id: string): Promise<ChoreographyDoc> {
    const response = await this.request("GET", `/choreographies/${id}`);
    return await response.json();
  }

  /** PUT a document citing the revision it was based on; bumps on success. */
  async putChoreography(id: string, doc: ChoreographyDoc): Promise<number> {
    const response = await this.request("PUT", `/choreographies/${id}`, doc);
    return (await response.json()).revision;
  }

  async distances(id: string): Promise<DistancesPayload> {
    const response = await this.request("GET", `/choreographies/${id}/analysis/distances`);
    return (await response.json()).distances;
  }

  async collisions(id: string, threshold = 0.5): Promise<CollisionsPayload> {
    const response = await this.request(
      "GET",
      `/choreographies/${id}/analysis/collisions?threshold=${threshold}`,
    );
    return (await response.json()).collisions;
  }

  async heatmap(id: string, cell = 0.5): Promise<HeatmapPayload> {
    const response = await this.request("GET", `/choreographies/${id}/analysis/heatmap?cell=${cell}`);
    return (await response.json()).heatmap;
  }

  async postAssessment(
    id: string,
    body: { tracks_xml: string; correspondences: unknown[]; stride?: number; select?: string[] },
  ): Promise<{ assessment_id: string; sample_count: number }> {
    const response = await this.request("POST", `/choreographies/${id}/assessments`, body);
    return await response.json();
  }

  async assessmentTimeline(assessmentId: string, select?: string[]): Promise<AssessmentTimeline> {
    const query = select && select.length ? `?select=${select.join(",")}` : "";
    const response = await this.request("GET", `/assessments/${assessmentId}/timeline${query}`);
    return await response.json();
  }

  async assessmentFrame(assessmentId: string, frame: number): Promise<DeviationSampleDoc> {
    const response = await this.request("GET", `/assessments/${assessmentId}/frames/${frame}`);
    return await response.json();
  }
}
