/**
 * Typed client for the synergy analysis HTTP API. Every number shown in the
 * UI comes from one of these responses; nothing is recomputed client-side.
 */

export interface Estimate {
  wins: number;
  games: number;
  rate: number;
  ci_low: number;
  ci_high: number;
}

export interface MatrixEntry {
  pair: string[];
  synergy: number;
  set_value: number;
  baseline_value: number;
  joint: Estimate;
  sufficient_games: boolean;
}

export interface HealthResponse {
  status: string;
  snapshot_version: number;
}

export interface PoolResponse {
  snapshot_version: number;
  pool: string[];
  records: number;
  source_digest: string;
}

export interface MatrixResponse {
  snapshot_version: number;
  baseline: string;
  min_games: number;
  pool: string[];
  entries: MatrixEntry[];
}

export interface DraftRequest {
  allies: string[];
  enemies: string[];
  unavailable: string[];
  k?: number | null;
}

export interface Recommendation {
  candidate: string;
  total_score: number;
  ally_component: number;
  counter_component: number;
  low_confidence: boolean;
}

export interface RecommendResponse {
  snapshot_version: number;
  recommendations: Recommendation[];
}

export interface Contribution {
  other: string;
  value: number;
  known: boolean;
  sufficient_games: boolean;
}

export interface WhatIfResponse {
  snapshot_version: number;
  recommendation: Recommendation;
  ally_contributions: Contribution[];
  enemy_contributions: Contribution[];
  projected_allies: string[];
}

/** Error from the service (status > 0) or from the transport (status 0). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export function isAbortError(err: unknown): boolean {
  // name check instead of instanceof: DOMException may come from another realm
  return (
    typeof err === "object" &&
    err !== null &&
    (err as { name?: unknown }).name === "AbortError"
  );
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  health(signal?: AbortSignal): Promise<HealthResponse> {
    return this.request<HealthResponse>("/api/health", { signal });
  }

  pool(signal?: AbortSignal): Promise<PoolResponse> {
    return this.request<PoolResponse>("/api/pool", { signal });
  }

  matrix(signal?: AbortSignal): Promise<MatrixResponse> {
    return this.request<MatrixResponse>("/api/matrix", { signal });
  }

  recommend(req: DraftRequest, signal?: AbortSignal): Promise<RecommendResponse> {
    return this.post<RecommendResponse>("/api/recommend", req, signal);
  }

  whatIf(req: DraftRequest, candidate: string, signal?: AbortSignal): Promise<WhatIfResponse> {
    return this.post<WhatIfResponse>("/api/whatif", { ...req, candidate }, signal);
  }

  private post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path, init);
    } catch (err) {
      if (isAbortError(err)) throw err;
      throw new ApiError(0, "unreachable", String(err));
    }
    if (!resp.ok) {
      throw await toApiError(resp);
    }
    return (await resp.json()) as T;
  }
}

/** Structural view of the client, handy for substituting fakes in tests. */
export type SynergyApi = Pick<
  ApiClient,
  "health" | "pool" | "matrix" | "recommend" | "whatIf"
>;

async function toApiError(resp: Response): Promise<ApiError> {
  let code = `http_${resp.status}`;
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { error?: string; detail?: string };
    if (typeof body.error === "string") code = body.error;
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status fallback
  }
  return new ApiError(resp.status, code, detail);
}
