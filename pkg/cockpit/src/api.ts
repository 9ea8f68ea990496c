/**
 * Typed client for the gateway HTTP API.
 *
 * The cockpit renders gateway responses verbatim and computes no risk
 * logic of its own, so this client is a thin, faithful mapping of the
 * endpoints it consumes.
 */

export interface RiskSignal {
  pattern: string;
  detail: string;
  severity: string;
}

export interface FeedEntry {
  trace_id: string;
  agent_id: string;
  tool_name: string;
  decision: string;
  risk_level: string;
  category: string;
  timestamp: number;
}

export interface ReviewRequest {
  agent_id: string;
  tool_name: string;
  arguments: unknown;
  session_id?: string | null;
}

export interface PendingReview {
  trace_id: string;
  created_at: number;
  request: ReviewRequest;
  risk_signals: RiskSignal[];
  status: string;
  reviewer: string | null;
  approval_url: string;
}

export interface TraceDetail {
  trace_id: string;
  agent_id: string;
  tool_call: { tool_name: string; arguments: unknown; session_id: string | null };
  timestamp: number;
  decision: string;
  risk_level: string;
  risk_signals: RiskSignal[];
  category: string;
  chain_position: number;
  latency_ms?: number;
  previous_hash: string;
  integrity_hash: string;
}

export interface PolicySummary {
  id: string;
  name: string;
  category: string;
  risk_level: string;
}

export interface ChainStatus {
  valid: boolean;
  total_records: number;
  registry_checksum: string;
  first_bad_index?: number;
  failure_kind?: string;
}

export class GatewayError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "GatewayError";
  }
}

/** Another reviewer resolved the entry first. */
export class ReviewConflictError extends GatewayError {
  constructor(message: string) {
    super(409, message);
    this.name = "ReviewConflictError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string, fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (response.status === 409) {
      throw new ReviewConflictError(`already resolved: ${path}`);
    }
    if (!response.ok) {
      throw new GatewayError(response.status, `${path} returned HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }

  async health(): Promise<boolean> {
    try {
      await this.request<{ status: string }>("/healthz");
      return true;
    } catch {
      return false;
    }
  }

  async feed(since?: number, limit = 100): Promise<FeedEntry[]> {
    const query = new URLSearchParams({ limit: String(limit) });
    if (since !== undefined) query.set("since", String(since));
    const body = await this.request<{ traces: FeedEntry[] }>(`/api/v1/traces?${query}`);
    return body.traces;
  }

  async queue(): Promise<PendingReview[]> {
    const body = await this.request<{ reviews: PendingReview[] }>(
      "/api/v1/reviews?status=pending",
    );
    return body.reviews;
  }

  async trace(traceId: string): Promise<TraceDetail> {
    return this.request<TraceDetail>(`/api/v1/traces/${encodeURIComponent(traceId)}`);
  }

  async policies(): Promise<PolicySummary[]> {
    const body = await this.request<{ policies: PolicySummary[] }>("/api/v1/policies");
    return body.policies;
  }

  async chainStatus(): Promise<ChainStatus> {
    return this.request<ChainStatus>("/api/v1/chain/status");
  }

  async decision(traceId: string): Promise<string> {
    const body = await this.request<{ decision: string }>(
      `/api/v1/decision/${encodeURIComponent(traceId)}`,
    );
    return body.decision;
  }

  /** Post a reviewer verdict; throws ReviewConflictError on a lost race. */
  async review(traceId: string, decision: "allow" | "block", reviewer: string): Promise<void> {
    await this.request(`/api/v1/review/${encodeURIComponent(traceId)}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ decision, reviewer }),
    });
  }
}
