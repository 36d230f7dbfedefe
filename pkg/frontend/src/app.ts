/** Ballot page controller: server-confirmed state, no optimistic updates.
 *
 * Every click round-trips through the edits endpoint and the page re-renders
 * from the response, so what the voter sees is always the server's draft.
 * At most one edit request is in flight; further clicks queue behind it.
 */

import { ApiClient, SubmitRejectedError, loadApiBaseUrl } from "./api";
import { RankingFlow } from "./ranking";
import type { EditRequest, ElectionView, SessionState } from "./types";
import { buildBallotView, feedbackMessage, renderVariant } from "./view";

export class BallotApp {
  private election!: ElectionView;
  private session!: SessionState;
  private ranking: RankingFlow | null = null;
  private inFlight = false;
  private queue: EditRequest[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    private readonly electionId: string,
    private readonly voterId: string,
  ) {}

  async start(): Promise<void> {
    this.election = await this.api.getElection(this.electionId);
    this.session = await this.api.getSession(this.electionId, this.voterId);
    if (this.election.method.type === "k_ranking") {
      this.ranking = new RankingFlow(this.election);
    }
    this.container.addEventListener("click", (event) => this.onClick(event));
    this.render();
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    if (!(target instanceof HTMLElement)) return;

    if (target.matches("button.token-inc, button.token-dec")) {
      if ((target as HTMLButtonElement).disabled) return;
      const project = target.dataset.project!;
      const delta = Number(target.dataset.direction);
      void this.enqueueEdit({ op: "delta", project, delta: delta as 1 | -1 });
    } else if (target.matches("button.submit-ballot")) {
      if ((target as HTMLButtonElement).disabled) return;
      void this.submit();
    } else if (this.ranking) {
      this.onRankingClick(target);
    }
  }

  private onRankingClick(target: HTMLElement): void {
    const flow = this.ranking!;
    if (target instanceof HTMLInputElement && target.dataset.project) {
      flow.toggle(target.dataset.project);
      this.render();
    } else if (target.matches("button.ranking-next")) {
      flow.beginOrdering();
      void this.enqueueEdit({ op: "set_ranking", steps: flow.steps() });
    } else if (target.matches("button.move-up, button.move-down")) {
      const offset = target.classList.contains("move-up") ? -1 : 1;
      flow.move(target.dataset.project!, offset);
      void this.enqueueEdit({ op: "set_ranking", steps: flow.steps() });
    }
  }

  /** Serialize edits: one request in flight, later clicks wait their turn. */
  async enqueueEdit(edit: EditRequest): Promise<void> {
    this.queue.push(edit);
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      while (this.queue.length > 0) {
        const next = this.queue.shift()!;
        try {
          this.session = await this.api.sendEdit(this.electionId, this.voterId, next);
          this.clearNetworkBanner();
        } catch {
          // transport failure: keep the page usable, re-sync on recovery
          this.showNetworkBanner();
          this.session = await this.refetchSessionQuietly();
        }
        this.render();
      }
    } finally {
      this.inFlight = false;
    }
  }

  async submit(): Promise<void> {
    try {
      const receipt = await this.api.submit(this.electionId, this.voterId);
      this.renderReceipt(receipt.sequence);
    } catch (error) {
      if (error instanceof SubmitRejectedError) {
        this.renderSubmitViolations(error);
        return;
      }
      this.showNetworkBanner();
    }
  }

  // -- rendering ------------------------------------------------------------

  render(): void {
    const stage = this.ensureStage();
    stage.replaceChildren();

    if (this.ranking) {
      stage.appendChild(this.ranking.render());
    } else {
      stage.appendChild(renderVariant(buildBallotView(this.election, this.session)));
    }

    const submit = document.createElement("button");
    submit.type = "button";
    submit.className = "submit-ballot";
    submit.textContent = "Submit ballot";
    submit.disabled = this.draftIsEmpty();
    if (submit.disabled) {
      submit.title = "Make a choice first";
    }
    stage.appendChild(submit);
  }

  private renderReceipt(sequence: number): void {
    const stage = this.ensureStage();
    stage.replaceChildren();
    const receipt = document.createElement("div");
    receipt.className = "receipt";
    receipt.textContent = `Ballot received. Receipt number ${sequence}.`;
    stage.appendChild(receipt);
  }

  private renderSubmitViolations(error: SubmitRejectedError): void {
    this.render();
    const stage = this.ensureStage();
    for (const violation of error.violations) {
      const note = document.createElement("div");
      note.className = "violation";
      if (violation.subject) {
        note.dataset.subject = violation.subject;
      }
      note.textContent = feedbackMessage(violation.code);
      const anchor = violation.subject
        ? stage.querySelector(`li.project[data-project="${violation.subject}"]`)
        : null;
      (anchor ?? stage).appendChild(note);
    }
  }

  private draftIsEmpty(): boolean {
    const draft = this.session.draft;
    return (
      Object.keys(draft.tokens ?? {}).length === 0 &&
      (draft.approved ?? []).length === 0 &&
      (draft.ranking ?? []).length === 0 &&
      (draft.comparisons ?? []).length === 0
    );
  }

  private ensureStage(): HTMLElement {
    let stage = this.container.querySelector<HTMLElement>(".stage");
    if (!stage) {
      stage = document.createElement("div");
      stage.className = "stage";
      this.container.appendChild(stage);
    }
    return stage;
  }

  private showNetworkBanner(): void {
    if (this.container.querySelector("#network-banner")) return;
    const banner = document.createElement("div");
    banner.id = "network-banner";
    banner.textContent = "Connection problem. Your last change may not have been saved.";
    this.container.prepend(banner);
  }

  private clearNetworkBanner(): void {
    this.container.querySelector("#network-banner")?.remove();
  }

  private async refetchSessionQuietly(): Promise<SessionState> {
    try {
      return await this.api.getSession(this.electionId, this.voterId);
    } catch {
      return this.session;
    }
  }
}

/** Browser entry point; reads election and voter from the query string. */
export async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const electionId = params.get("election");
  const voterId = params.get("voter");
  const container = document.getElementById("app");
  if (!electionId || !voterId || !container) {
    throw new Error("open this page as ?election=<id>&voter=<id>");
  }
  const api = new ApiClient(await loadApiBaseUrl());
  const app = new BallotApp(api, container, electionId, voterId);
  await app.start();
}
