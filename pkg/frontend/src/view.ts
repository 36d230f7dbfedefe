/** Pure DOM rendering of the token ballot: same view in, same tree out.
 *
 * Variant A shows per-project controls only; B adds the top progress bar
 * (#topbar), C the side summary panel (#sidebar), D both. Counts, limits
 * and the remaining budget always come from the latest server response;
 * nothing here recomputes affordability on its own.
 */

import type {
  ElectionView,
  SessionState,
  UiBallotView,
} from "./types";

export function buildBallotView(
  election: ElectionView,
  session: SessionState,
): UiBallotView {
  if (!session.budget || !session.max_affordable) {
    throw new Error("session has no budget data; not a token election");
  }
  const tokens = session.draft.tokens ?? {};
  const limits = session.max_affordable;
  return {
    quadratic: election.method.type === "quadratic",
    projects: election.projects.map((project) => {
      const assigned = tokens[project.id] ?? 0;
      const limit = limits[project.id] ?? 0;
      return {
        project,
        tokens: assigned,
        maxAffordable: limit,
        canIncrement: limit > assigned,
        canDecrement: assigned > 0,
      };
    }),
    budget: session.budget,
    variant: election.ui_variant,
    feedback: session.feedback,
  };
}

export function renderVariant(view: UiBallotView): HTMLElement {
  const root = document.createElement("div");
  root.className = "ballot";

  if (view.variant === "B" || view.variant === "D") {
    root.appendChild(renderTopBar(view));
  }

  const main = document.createElement("div");
  main.className = "ballot-main";
  main.appendChild(renderProjectList(view));
  if (view.variant === "C" || view.variant === "D") {
    main.appendChild(renderSideBar(view));
  }
  root.appendChild(main);

  if (view.feedback) {
    const note = document.createElement("div");
    note.className = "feedback";
    note.setAttribute("role", "alert");
    note.textContent = feedbackMessage(view.feedback);
    root.appendChild(note);
  }
  return root;
}

function renderTopBar(view: UiBallotView): HTMLElement {
  const bar = document.createElement("div");
  bar.id = "topbar";
  const { spent, budget, remaining } = view.budget;

  const track = document.createElement("div");
  track.className = "topbar-track";
  const fill = document.createElement("div");
  fill.className = "topbar-fill";
  const fraction = budget === 0 ? 0 : spent / budget;
  fill.dataset.fraction = String(fraction);
  fill.style.width = `${fraction * 100}%`;
  track.appendChild(fill);

  const label = document.createElement("span");
  label.className = "topbar-remaining";
  label.textContent = `${remaining} remaining`;

  bar.append(track, label);
  return bar;
}

function renderSideBar(view: UiBallotView): HTMLElement {
  const panel = document.createElement("aside");
  panel.id = "sidebar";

  const list = document.createElement("ul");
  list.className = "sidebar-assigned";
  for (const row of view.projects) {
    if (row.tokens <= 0) continue; // only projects holding tokens
    const item = document.createElement("li");
    item.dataset.project = row.project.id;
    item.textContent = `${row.project.title}: ${row.tokens}`;
    list.appendChild(item);
  }
  const total = document.createElement("div");
  total.className = "sidebar-remaining";
  total.textContent = `${view.budget.remaining} remaining`;

  panel.append(list, total);
  return panel;
}

function renderProjectList(view: UiBallotView): HTMLElement {
  const list = document.createElement("ul");
  list.className = "projects";
  for (const row of view.projects) {
    const item = document.createElement("li");
    item.className = "project";
    item.dataset.project = row.project.id;

    const title = document.createElement("span");
    title.className = "project-title";
    title.textContent = row.project.title;

    const dec = tokenButton(row.project.id, -1, row.canDecrement);
    const count = document.createElement("span");
    count.className = "token-count";
    count.dataset.project = row.project.id;
    count.textContent = String(row.tokens);
    const inc = tokenButton(row.project.id, +1, row.canIncrement);

    item.append(title, dec, count, inc);

    if (view.quadratic) {
      // surface the quadratic trade-off: the next token costs 2t + 1
      const next = document.createElement("span");
      next.className = "next-cost";
      next.textContent = `next token costs ${(row.tokens + 1) ** 2 - row.tokens ** 2}`;
      item.appendChild(next);
    }
    list.appendChild(item);
  }
  return list;
}

function tokenButton(projectId: string, direction: 1 | -1, enabled: boolean): HTMLButtonElement {
  const button = document.createElement("button");
  button.type = "button";
  button.className = direction > 0 ? "token-inc" : "token-dec";
  button.dataset.project = projectId;
  button.dataset.direction = String(direction);
  button.textContent = direction > 0 ? "+" : "−";
  button.disabled = !enabled;
  return button;
}

const FEEDBACK_TEXT: Record<string, string> = {
  budget_exceeded: "Not enough tokens left for that.",
  negative_tokens: "There are no tokens to remove there.",
  cap_exceeded: "This project cannot hold more tokens.",
  unknown_project: "That project is not part of this vote.",
  election_closed: "This vote has closed.",
  empty_ballot: "Assign at least one token before submitting.",
  too_many_approvals: "You have used all your picks.",
  duplicate_selection: "That project is already picked.",
};

export function feedbackMessage(code: string): string {
  return FEEDBACK_TEXT[code] ?? `Your change was not accepted (${code}).`;
}
