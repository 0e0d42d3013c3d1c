/** Typed client for the planning service. Every number the UI displays
 *  originates from one of these responses. */

export interface GraphNode {
  label: string;
  eta: number;
  lam: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  tau: number;
}

export interface GraphBody {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface SolutionBody {
  members: string[];
  member_ids: number[];
  willingness: number;
  connected: boolean;
  eta_contributions: Record<string, number>;
  edge_contributions: GraphEdge[];
}

export interface SessionState {
  id: string;
  n: number;
  labels: string[];
  k: number;
  algorithm: string;
  seed: number;
  budget: number;
  mode: string;
  notes: string[];
  rsvp: Record<string, string>;
  solution: SolutionBody | null;
  graph: GraphBody;
}

export interface EvaluateBody {
  willingness: number;
  connected: boolean;
  members: string[];
}

export interface SolverConfigBody {
  k: number;
  budget?: number;
  seed?: number;
  algorithm?: string;
  starts?: number;
  stages?: number;
  rho?: number;
  smoothing?: number;
  workers?: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, method: string, body?: unknown): Promise<T> {
  const resp = await fetch(url, {
    method,
    headers: { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await resp.json();
  if (!resp.ok) {
    throw new ApiError(resp.status, payload.code ?? "error", payload.message ?? "request failed");
  }
  return payload as T;
}

export class PlannerClient {
  constructor(private baseUrl: string) {}

  createSession(body: {
    edges?: string;
    scores?: string;
    synthetic?: Record<string, unknown>;
    config: SolverConfigBody;
    scenario?: Record<string, unknown>;
  }): Promise<{ id: string; n: number; notes: string[] }> {
    return request(`${this.baseUrl}/sessions`, "POST", body);
  }

  getSession(id: string): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}`, "GET");
  }

  solve(id: string): Promise<SolutionBody> {
    return request(`${this.baseUrl}/sessions/${id}/solve`, "POST");
  }

  rsvp(id: string, node: string, status: string): Promise<{ rsvp: Record<string, string> }> {
    return request(`${this.baseUrl}/sessions/${id}/rsvp`, "POST", { node, status });
  }

  replan(id: string, force = false): Promise<SolutionBody> {
    return request(`${this.baseUrl}/sessions/${id}/replan`, "POST", { force });
  }

  evaluate(id: string, members: string[]): Promise<EvaluateBody> {
    return request(`${this.baseUrl}/sessions/${id}/evaluate`, "POST", { members });
  }
}
