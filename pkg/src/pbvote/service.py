"""Election service core: administration, live ballot editing, submission.

The service owns the authoritative draft per (election, voter); all draft
changes go through the ballot engine's validated transitions, so no
over-budget draft can ever be observed. Domain violations during editing
are returned in-band as feedback codes rather than raised, because they
are voter-facing UI content.

The HTTP layer in ``httpapi`` and the CLI's offline mode both drive this
class, so there is exactly one write path.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from . import ballots
from .ballots import Allocation, BudgetStatus, allocation_to_wire
from .elections import (
    DISTRIBUTIONAL_METHODS,
    ElectionConfig,
    Method,
    config_from_dict,
    parse_config,
    serialize_config,
    validate_config,
)
from .errors import (
    ConflictError,
    UnknownElectionError,
    UnknownProjectError,
    ValidationFailedError,
    VotingError,
)
from .store import VoteStore
from .tally import (
    DEFAULT_WORK_BOUND,
    TallyResult,
    select_winners_exact,
    select_winners_greedy,
    tally,
)

CONFIG_SUFFIX = ".election.json"


@dataclass(frozen=True)
class SessionState:
    """A voter's current draft plus the budget facts the UI needs."""

    election_id: str
    voter_id: str
    draft: Allocation
    budget: BudgetStatus | None
    max_affordable: dict[str, int] | None
    feedback: str | None = None

    def to_wire(self) -> dict:
        return {
            "election_id": self.election_id,
            "voter_id": self.voter_id,
            "draft": allocation_to_wire(self.draft),
            "budget": (
                None
                if self.budget is None
                else {
                    "spent": self.budget.spent,
                    "budget": self.budget.budget,
                    "remaining": self.budget.remaining,
                }
            ),
            "max_affordable": self.max_affordable,
            "feedback": self.feedback,
        }


class ElectionService:
    """In-process service over a data directory.

    Election configs persist as ``<id>.election.json``; ballots go to the
    append-only vote store. A coarse lock serializes mutations, which also
    serializes edits per (election, voter) session as required.
    """

    def __init__(self, data_dir: str | Path):
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self.store = VoteStore(self._dir)
        self._elections: dict[str, ElectionConfig] = {}
        self._sessions: dict[tuple[str, str], Allocation] = {}
        for path in sorted(self._dir.glob(f"*{CONFIG_SUFFIX}")):
            config = parse_config(path.read_text("utf-8"))
            self._elections[config.id] = config
            self.store.open_log(config.id)

    # -- administration ------------------------------------------------------

    def create_election(self, document: str | Mapping) -> str:
        """Parse, validate, persist and open a new election; returns its id.

        Raises:
            ConfigParseError: structurally malformed document.
            ValidationFailedError: semantic violations (config is invalid).
            ConflictError: an election with this id already exists.
        """
        if isinstance(document, str):
            config = parse_config(document)
        else:
            config = config_from_dict(document)
        violations = validate_config(config)
        if violations:
            raise ValidationFailedError(violations)
        with self._lock:
            if config.id in self._elections:
                raise ConflictError(config.id)
            self._persist(config)
            self._elections[config.id] = config
            self.store.open_log(config.id)
        return config.id

    def close_election(self, election_id: str) -> None:
        """Mark the election closed; further edits and submissions are refused."""
        with self._lock:
            config = self._election(election_id)
            if config.open:
                closed = ElectionConfig(
                    id=config.id,
                    name=config.name,
                    projects=config.projects,
                    monetary_budget=config.monetary_budget,
                    method_spec=config.method_spec,
                    ui_variant=config.ui_variant,
                    open=False,
                )
                self._persist(closed)
                self._elections[election_id] = closed

    def election(self, election_id: str) -> ElectionConfig:
        with self._lock:
            return self._election(election_id)

    def election_view(self, election_id: str) -> dict:
        """Public view of an election; never includes any ballots."""
        config = self.election(election_id)
        spec = config.method_spec
        method: dict = {"type": spec.method.value}
        if spec.token_budget is not None:
            method["token_budget"] = spec.token_budget
        if spec.k is not None:
            method["k"] = spec.k
        if spec.per_project_cap is not None:
            method["per_project_cap"] = spec.per_project_cap
        return {
            "id": config.id,
            "name": config.name,
            "monetary_budget": config.monetary_budget,
            "method": method,
            "ui_variant": config.ui_variant.value,
            "open": config.open,
            "projects": [
                {
                    "id": p.id,
                    "title": p.title,
                    "cost": p.cost,
                    "description": p.description,
                }
                for p in config.projects
            ],
        }

    # -- voter sessions --------------------------------------------------------

    def get_session(self, election_id: str, voter_id: str) -> SessionState:
        with self._lock:
            config = self._election(election_id)
            draft = self._draft(config, voter_id)
            return self._session_state(config, voter_id, draft)

    def edit_ballot(self, election_id: str, voter_id: str, edit: Mapping) -> SessionState:
        """Apply one edit to the voter's draft.

        On a domain violation the draft is left unchanged and the violation
        code is returned as in-band feedback; the response always carries a
        fresh budget status and per-project affordability.
        """
        with self._lock:
            config = self._election(election_id)
            draft = self._draft(config, voter_id)
            if not config.open:
                return self._session_state(config, voter_id, draft, feedback="election_closed")
            try:
                updated = self._apply_edit(config, draft, edit)
            except VotingError as exc:
                return self._session_state(config, voter_id, draft, feedback=exc.code)
            self._sessions[(election_id, voter_id)] = updated
            return self._session_state(config, voter_id, updated)

    def submit_ballot(self, election_id: str, voter_id: str) -> dict:
        """Validate the draft and append it to the vote store.

        The draft is retained so the voter can revise and revote.

        Raises:
            ElectionClosedError, ValidationFailedError.
        """
        with self._lock:
            config = self._election(election_id)
            draft = self._draft(config, voter_id)
            record = self.store.append_vote(config, voter_id, draft)
            return {"sequence": record.sequence, "submitted_at": record.submitted_at}

    def submit_allocation(self, election_id: str, voter_id: str, allocation: Allocation) -> dict:
        """Submit a complete allocation directly (synthetic-ballot path).

        Shares the store's validate-and-append path with ``submit_ballot``.
        """
        with self._lock:
            config = self._election(election_id)
            record = self.store.append_vote(config, voter_id, allocation)
            return {"sequence": record.sequence, "submitted_at": record.submitted_at}

    # -- results ----------------------------------------------------------------

    def tally_result(self, election_id: str, rule: str = "greedy",
                     work_bound: int = DEFAULT_WORK_BOUND) -> TallyResult:
        with self._lock:
            config = self._election(election_id)
            ballots_ = self.store.effective_ballots(election_id)
        scoreboard = tally(config, ballots_)
        if rule == "exact":
            return select_winners_exact(
                scoreboard, config.projects, config.monetary_budget, work_bound
            )
        if rule == "greedy":
            return select_winners_greedy(scoreboard, config.projects, config.monetary_budget)
        raise ValueError(f"unknown selection rule: {rule!r}")

    # -- internals ----------------------------------------------------------------

    def _persist(self, config: ElectionConfig) -> None:
        path = self._dir / f"{config.id}{CONFIG_SUFFIX}"
        path.write_text(serialize_config(config), "utf-8")

    def _election(self, election_id: str) -> ElectionConfig:
        config = self._elections.get(election_id)
        if config is None:
            raise UnknownElectionError(election_id)
        return config

    def _draft(self, config: ElectionConfig, voter_id: str) -> Allocation:
        key = (config.id, voter_id)
        draft = self._sessions.get(key)
        if draft is None:
            draft = ballots.empty_allocation(config.method_spec.method)
            self._sessions[key] = draft
        return draft

    def _apply_edit(self, config: ElectionConfig, draft: Allocation, edit: Mapping) -> Allocation:
        spec = config.method_spec
        op = edit.get("op")
        if op == "delta":
            return ballots.apply_delta(
                spec,
                draft,
                str(edit.get("project")),
                int(edit.get("delta", 0)),
                config.project_ids(),
            )
        if op == "approve":
            return ballots.apply_approval(spec, draft, str(edit.get("project")), True, config)
        if op == "unapprove":
            return ballots.apply_approval(spec, draft, str(edit.get("project")), False, config)
        if op == "set_ranking":
            steps = [str(s) for s in edit.get("steps", [])]
            known = config.project_ids()
            for step in steps:
                if step not in known:
                    raise UnknownProjectError(step)
            return ballots.build_ranking(steps, spec.k or 0)
        if op == "compare":
            return ballots.apply_comparison(
                spec,
                draft,
                str(edit.get("winner")),
                str(edit.get("loser")),
                config.project_ids(),
            )
        if op == "uncompare":
            winner, loser = str(edit.get("winner")), str(edit.get("loser"))
            kept = tuple(
                pair
                for pair in draft.comparisons
                if frozenset(pair) != frozenset((winner, loser))
            )
            return Allocation(method=Method.PAIRWISE, comparisons=kept)
        if op == "clear":
            return ballots.empty_allocation(spec.method)
        raise ValueError(f"unknown edit op: {op!r}")

    def _session_state(
        self,
        config: ElectionConfig,
        voter_id: str,
        draft: Allocation,
        feedback: str | None = None,
    ) -> SessionState:
        spec = config.method_spec
        budget = None
        affordable = None
        if spec.method in DISTRIBUTIONAL_METHODS:
            budget = ballots.budget_status(spec, draft)
            ids = config.project_ids()
            affordable = {
                p.id: ballots.max_affordable(spec, draft, p.id, ids)
                for p in config.projects
            }
        return SessionState(
            election_id=config.id,
            voter_id=voter_id,
            draft=draft,
            budget=budget,
            max_affordable=affordable,
            feedback=feedback,
        )
