/** Two-phase k-ranking flow: pick up to k projects, then order them.
 *
 * Phase one is an approval-style checkbox list with a remaining-picks
 * counter; a pick beyond k is blocked client-side with feedback. Phase two
 * orders the picked projects with move up/down controls. The submitted
 * ranking is exactly the ordered list of selection steps.
 */

import type { ElectionView } from "./types";

export interface RankingState {
  phase: 1 | 2;
  picked: string[];
  feedback: string | null;
}

export class RankingFlow {
  readonly k: number;
  private state: RankingState = { phase: 1, picked: [], feedback: null };

  constructor(private readonly election: ElectionView) {
    this.k = election.method.k ?? 0;
  }

  get snapshot(): RankingState {
    return { ...this.state, picked: [...this.state.picked] };
  }

  get picksLeft(): number {
    return this.k - this.state.picked.length;
  }

  toggle(projectId: string): void {
    const { picked } = this.state;
    const index = picked.indexOf(projectId);
    if (index >= 0) {
      picked.splice(index, 1);
      this.state.feedback = null;
      return;
    }
    if (picked.length >= this.k) {
      this.state.feedback = `You can pick at most ${this.k} projects.`;
      return;
    }
    picked.push(projectId);
    this.state.feedback = null;
  }

  beginOrdering(): void {
    if (this.state.picked.length === 0) {
      this.state.feedback = "Pick at least one project first.";
      return;
    }
    this.state = { ...this.state, phase: 2, feedback: null };
  }

  move(projectId: string, offset: -1 | 1): void {
    const { picked } = this.state;
    const from = picked.indexOf(projectId);
    const to = from + offset;
    if (from < 0 || to < 0 || to >= picked.length) return;
    [picked[from], picked[to]] = [picked[to], picked[from]];
  }

  /** The ordered selection steps sent as the set_ranking edit. */
  steps(): string[] {
    return [...this.state.picked];
  }

  render(): HTMLElement {
    const root = document.createElement("div");
    root.className = "ranking";
    root.dataset.phase = String(this.state.phase);
    if (this.state.phase === 1) {
      root.appendChild(this.renderPicker());
    } else {
      root.appendChild(this.renderOrdering());
    }
    if (this.state.feedback) {
      const note = document.createElement("div");
      note.className = "feedback";
      note.textContent = this.state.feedback;
      root.appendChild(note);
    }
    return root;
  }

  private renderPicker(): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "ranking-picker";

    const counter = document.createElement("div");
    counter.className = "picks-left";
    counter.textContent = `${this.picksLeft} picks left`;
    wrap.appendChild(counter);

    const list = document.createElement("ul");
    for (const project of this.election.projects) {
      const item = document.createElement("li");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.project = project.id;
      box.checked = this.state.picked.includes(project.id);
      const label = document.createElement("label");
      label.textContent = project.title;
      item.append(box, label);
      list.appendChild(item);
    }
    wrap.appendChild(list);

    const next = document.createElement("button");
    next.type = "button";
    next.className = "ranking-next";
    next.textContent = "Order your picks";
    next.disabled = this.state.picked.length === 0;
    wrap.appendChild(next);
    return wrap;
  }

  private renderOrdering(): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "ranking-order";
    const list = document.createElement("ol");
    const titles = new Map(this.election.projects.map((p) => [p.id, p.title]));
    this.state.picked.forEach((projectId, index) => {
      const item = document.createElement("li");
      item.dataset.project = projectId;

      const label = document.createElement("span");
      label.textContent = titles.get(projectId) ?? projectId;

      const up = document.createElement("button");
      up.type = "button";
      up.className = "move-up";
      up.dataset.project = projectId;
      up.textContent = "▲";
      up.disabled = index === 0;

      const down = document.createElement("button");
      down.type = "button";
      down.className = "move-down";
      down.dataset.project = projectId;
      down.textContent = "▼";
      down.disabled = index === this.state.picked.length - 1;

      item.append(label, up, down);
      list.appendChild(item);
    });
    wrap.appendChild(list);
    return wrap;
  }
}
