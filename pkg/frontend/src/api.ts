/** Thin fetch client for the election service routes. */

import type {
  EditRequest,
  ElectionView,
  SessionState,
  SubmitReceipt,
  ViolationWire,
} from "./types";

export class SubmitRejectedError extends Error {
  constructor(
    public readonly code: string,
    public readonly violations: ViolationWire[],
  ) {
    super(code);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async getElection(electionId: string): Promise<ElectionView> {
    return this.getJson(`/elections/${encodeURIComponent(electionId)}`);
  }

  async getSession(electionId: string, voterId: string): Promise<SessionState> {
    return this.getJson(`${this.voterPath(electionId, voterId)}/session`);
  }

  async sendEdit(
    electionId: string,
    voterId: string,
    edit: EditRequest,
  ): Promise<SessionState> {
    const response = await this.fetchFn(
      `${this.baseUrl}${this.voterPath(electionId, voterId)}/edits`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(edit),
      },
    );
    if (!response.ok) {
      throw new Error(`edit failed: HTTP ${response.status}`);
    }
    return (await response.json()) as SessionState;
  }

  async submit(electionId: string, voterId: string): Promise<SubmitReceipt> {
    const response = await this.fetchFn(
      `${this.baseUrl}${this.voterPath(electionId, voterId)}/submit`,
      { method: "POST" },
    );
    const body = await response.json();
    if (!response.ok) {
      throw new SubmitRejectedError(body.error ?? "submit_failed", body.violations ?? []);
    }
    return body as SubmitReceipt;
  }

  private voterPath(electionId: string, voterId: string): string {
    return `/elections/${encodeURIComponent(electionId)}/voters/${encodeURIComponent(voterId)}`;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: HTTP ${response.status}`);
    }
    return (await response.json()) as T;
  }
}

/** Deploy-time configuration: the API base URL lives in config.json. */
export async function loadApiBaseUrl(fetchFn: FetchLike = (i, init) => fetch(i, init)): Promise<string> {
  const response = await fetchFn("./config.json");
  if (!response.ok) {
    throw new Error("missing config.json");
  }
  const config = (await response.json()) as { apiBaseUrl?: string };
  if (!config.apiBaseUrl) {
    throw new Error("config.json must define apiBaseUrl");
  }
  return config.apiBaseUrl.replace(/\/$/, "");
}
