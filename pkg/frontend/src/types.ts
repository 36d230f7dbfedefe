/** Wire types mirroring the election service responses. */

export type MethodType =
  | "cumulative"
  | "quadratic"
  | "k_approval"
  | "k_ranking"
  | "knapsack"
  | "pairwise";

export type Variant = "A" | "B" | "C" | "D";

export interface ProjectView {
  id: string;
  title: string;
  cost: number;
  description: string | null;
}

export interface ElectionView {
  id: string;
  name: string;
  monetary_budget: number;
  method: {
    type: MethodType;
    token_budget?: number;
    k?: number;
    per_project_cap?: number;
  };
  ui_variant: Variant;
  open: boolean;
  projects: ProjectView[];
}

export interface BudgetStatus {
  spent: number;
  budget: number;
  remaining: number;
}

export interface AllocationWire {
  method: MethodType;
  tokens?: Record<string, number>;
  approved?: string[];
  ranking?: string[];
  comparisons?: [string, string][];
}

export interface SessionState {
  election_id: string;
  voter_id: string;
  draft: AllocationWire;
  budget: BudgetStatus | null;
  max_affordable: Record<string, number> | null;
  feedback: string | null;
}

export interface SubmitReceipt {
  sequence: number;
  submitted_at: string;
}

export interface ViolationWire {
  code: string;
  subject: string | null;
  detail: string | null;
}

export type EditRequest =
  | { op: "delta"; project: string; delta: number }
  | { op: "approve"; project: string }
  | { op: "unapprove"; project: string }
  | { op: "set_ranking"; steps: string[] }
  | { op: "compare"; winner: string; loser: string }
  | { op: "uncompare"; winner: string; loser: string }
  | { op: "clear" };

/** One project row of the rendered ballot; flags come from the server state. */
export interface ProjectRow {
  project: ProjectView;
  tokens: number;
  maxAffordable: number;
  canIncrement: boolean;
  canDecrement: boolean;
}

/** Everything renderVariant needs; a pure function of the latest server state. */
export interface UiBallotView {
  quadratic: boolean;
  projects: ProjectRow[];
  budget: BudgetStatus;
  variant: Variant;
  feedback: string | null;
}
