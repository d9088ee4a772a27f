/**
 * Typed client for the topicdraw HTTP API.
 *
 * The fetch implementation is injectable so tests can run against a
 * recorded-response double. A 409 on job creation is not an error: the
 * server dedups identical jobs and returns the existing job id.
 */

export interface Neighbor {
  word: string;
  score: number;
  included: boolean;
}

export interface SimilarResult {
  central: string;
  neighbors: Neighbor[];
  meta: Record<string, unknown>;
}

export interface CondenseStats {
  central: string;
  match_set: string[];
  scope: number[];
  condensed_id: string;
  lines: { kept: number; scanned: number };
  bytes: { kept: number; scanned: number };
  reduction_ratio: number;
  per_year: Record<string, { lines_kept: number; lines_scanned: number }>;
  source_fingerprint: string;
}

export interface SeriesPoint {
  year: number;
  value: number;
}

export interface SeriesPayload {
  word: string;
  points: SeriesPoint[];
  gaps: number[];
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobStatus {
  job_id: string;
  stage: string;
  status: JobState;
  progress: number;
  result?: unknown;
  error?: string;
}

export interface TopicModel {
  config: { k: number; seed: number; iterations: number };
  top_words: string[][];
  log_likelihood: number[];
  summary?: string[];
}

export interface ThresholdRow {
  left: number;
  right: number;
}

export type PosClass = "noun" | "verb" | "adjective" | "adverb" | "default";

export type ThresholdGrid = Record<PosClass, ThresholdRow>;

export interface LdaRequestConfig {
  seed: number;
  k?: number;
  iterations?: number;
  burn_in?: number;
  alpha?: number;
  beta?: number;
  summary?: boolean;
}

export interface JobStartResult {
  jobId: string;
  duplicate: boolean;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: Record<string, unknown>,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(payload)}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseBody(response: Response): Promise<Record<string, unknown>> {
  try {
    return (await response.json()) as Record<string, unknown>;
  } catch {
    return { error: "unparseable response" };
  }
}

export class ApiClient {
  constructor(
    private fetchImpl: FetchLike,
    private base = "",
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    allowConflict = false,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    const payload = await parseBody(response);
    if (response.ok || (allowConflict && response.status === 409)) {
      return payload as T;
    }
    throw new ApiError(response.status, payload);
  }

  health(): Promise<{ status: string; corpus: { years: number[]; tokens: number } }> {
    return this.request("GET", "/api/health");
  }

  async startCountsJob(
    years: number[] | string | null,
    thresholds: ThresholdGrid | null,
  ): Promise<JobStartResult> {
    const payload = await this.request<Record<string, unknown>>(
      "POST",
      "/api/jobs/counts",
      { years, thresholds },
      true,
    );
    return {
      jobId: payload["job_id"] as string,
      duplicate: payload["error"] === "duplicate_job",
    };
  }

  getJob(jobId: string): Promise<JobStatus> {
    return this.request("GET", `/api/jobs/${jobId}`);
  }

  similar(
    central: string,
    k: number,
    options: {
      years?: number[] | string | null;
      thresholds?: ThresholdGrid | null;
      minFrequency?: number;
    } = {},
  ): Promise<SimilarResult> {
    return this.request("POST", "/api/similar", {
      central,
      k,
      years: options.years ?? null,
      thresholds: options.thresholds ?? null,
      min_frequency: options.minFrequency ?? 5,
    });
  }

  setIncluded(central: string, word: string, included: boolean): Promise<SimilarResult> {
    return this.request(
      "PATCH",
      `/api/similar/${encodeURIComponent(central)}/include`,
      { word, included },
    );
  }

  condense(central: string, years: number[] | string | null = null): Promise<CondenseStats> {
    return this.request("POST", "/api/condense", { central, years });
  }

  async startTopicsJob(condensedId: string, config: LdaRequestConfig): Promise<JobStartResult> {
    const payload = await this.request<Record<string, unknown>>(
      "POST",
      "/api/jobs/topics",
      { condensed: condensedId, config },
      true,
    );
    return {
      jobId: payload["job_id"] as string,
      duplicate: payload["error"] === "duplicate_job",
    };
  }

  seriesFreq(word: string, from: number, to: number): Promise<SeriesPayload> {
    const query = new URLSearchParams({ word, from: String(from), to: String(to) });
    return this.request("GET", `/api/series/freq?${query}`);
  }

  seriesSim(
    word: string,
    base: number,
    from: number,
    to: number,
    mode: "base" | "adjacent" = "base",
  ): Promise<SeriesPayload> {
    const query = new URLSearchParams({
      word,
      base: String(base),
      from: String(from),
      to: String(to),
      mode,
    });
    return this.request("GET", `/api/series/sim?${query}`);
  }
}
