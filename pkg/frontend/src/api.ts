import type {
  EngineName,
  FacetCount,
  FacetSelectionState,
  QueryState,
  ResultPage,
  Suggestion,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

let requestCounter = 0;

/** Monotonic per-tab request ids so the server can deduplicate retries. */
export function nextRequestId(): string {
  requestCounter += 1;
  return `web-${Date.now().toString(36)}-${requestCounter}`;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  ready(): Promise<{ status: string; catalog_hash: string; products: number }> {
    return this.request("/ready");
  }

  suggest(prefix: string, limit = 10): Promise<{ suggestions: Suggestion[] }> {
    const params = new URLSearchParams({ prefix, limit: String(limit) });
    return this.request(`/suggest?${params}`);
  }

  createSession(engine: EngineName): Promise<{ session_id: string; engine: EngineName }> {
    return this.post("/sessions", { engine });
  }

  submitQuery(
    sessionId: string,
    queryState: QueryState,
    action: string,
    requestId: string,
  ): Promise<{ page: ResultPage }> {
    return this.post(`/sessions/${sessionId}/query`, {
      query_state: queryState,
      action,
      request_id: requestId,
    });
  }

  submitSelection(
    sessionId: string,
    selection: FacetSelectionState,
    action: string,
    requestId: string,
  ): Promise<{ page: ResultPage }> {
    return this.post(`/sessions/${sessionId}/selection`, {
      selection,
      action,
      request_id: requestId,
    });
  }

  facetCounts(sessionId: string): Promise<{ counts: FacetCount[] }> {
    return this.request(`/sessions/${sessionId}/facet-counts`);
  }

  fetchPage(
    sessionId: string,
    pageIndex: number,
    requestId: string,
  ): Promise<{ page: ResultPage }> {
    return this.post(`/sessions/${sessionId}/page`, {
      page_index: pageIndex,
      request_id: requestId,
    });
  }

  selectProduct(
    sessionId: string,
    productId: string,
    requestId: string,
  ): Promise<{ session_id: string; selected: string }> {
    return this.post(`/sessions/${sessionId}/select`, {
      product_id: productId,
      request_id: requestId,
    });
  }

  product(productId: string): Promise<Record<string, unknown>> {
    return this.request(`/catalog/products/${productId}`);
  }
}
