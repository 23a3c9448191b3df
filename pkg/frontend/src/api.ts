/** Thin client for the suggestion service HTTP API. */

import type { HealthResponse, SuggestRequest, SuggestResponse, TableRecord } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, "network_error", String(err));
    }
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      // non-JSON body; fall through with null
    }
    if (!resp.ok) {
      const rec = (body ?? {}) as { code?: string; message?: string };
      throw new ApiError(resp.status, rec.code ?? "http_error",
        rec.message ?? `request failed with status ${resp.status}`);
    }
    return body as T;
  }

  suggest(req: SuggestRequest): Promise<SuggestResponse> {
    return this.request<SuggestResponse>("/v1/suggest", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  table(tableId: string): Promise<TableRecord> {
    return this.request<TableRecord>(`/v1/table/${encodeURIComponent(tableId)}`);
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/v1/health");
  }
}
