/** Shared fixtures: a fake fetch speaking the service protocol. */

import type {
  AllocationWire,
  BudgetStatus,
  ElectionView,
  SessionState,
  Variant,
} from "../src/types";

export function quadraticElection(variant: Variant = "D"): ElectionView {
  return {
    id: "e1",
    name: "Test vote",
    monetary_budget: 100,
    method: { type: "quadratic", token_budget: 10 },
    ui_variant: variant,
    open: true,
    projects: [
      { id: "p1", title: "Playground", cost: 60, description: null },
      { id: "p2", title: "Trees", cost: 50, description: null },
      { id: "p3", title: "Benches", cost: 40, description: null },
    ],
  };
}

export function rankingElection(k = 3): ElectionView {
  return {
    ...quadraticElection("A"),
    method: { type: "k_ranking", k },
  };
}

export function session(
  tokens: Record<string, number>,
  budget: BudgetStatus,
  maxAffordable: Record<string, number>,
  feedback: string | null = null,
): SessionState {
  return {
    election_id: "e1",
    voter_id: "alice",
    draft: { method: "quadratic", tokens },
    budget,
    max_affordable: maxAffordable,
    feedback,
  };
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

/** Scripted fetch: pops one response per request, records what was sent. */
export class FakeServer {
  requests: RecordedRequest[] = [];
  private scripted: Array<{ status: number; body: unknown } | Error> = [];

  constructor(
    private readonly election: ElectionView,
    private initialSession: SessionState,
  ) {}

  expect(body: unknown, status = 200): void {
    this.scripted.push({ status, body });
  }

  expectFailure(): void {
    this.scripted.push(new Error("connection refused"));
  }

  setSession(next: SessionState): void {
    this.initialSession = next;
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : null;
    this.requests.push({ url, method, body });

    if (method === "GET" && url.endsWith("/elections/e1")) {
      return jsonResponse(200, this.election);
    }
    if (method === "GET" && url.endsWith("/session")) {
      return jsonResponse(200, this.initialSession);
    }
    const next = this.scripted.shift();
    if (!next) {
      throw new Error(`unexpected request: ${method} ${url}`);
    }
    if (next instanceof Error) {
      throw next;
    }
    return jsonResponse(next.status, next.body);
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function wireDraft(tokens: Record<string, number>): AllocationWire {
  return { method: "quadratic", tokens };
}
