"""Ballot aggregation and budget-constrained winner selection.

Scores per method:
  cumulative / quadratic: sum of tokens placed on the project (tokens, not
    their cost: cost constrains the ballot, tokens express the preference)
  k-approval / knapsack: number of approving ballots
  k-ranking: positional weights, the i-th ranked project earns k - i + 1
  pairwise: number of comparison pairs won

Winners are chosen under the election's monetary budget, either greedily in
score order or exactly (score-maximizing knapsack). All tie-breaking is by
ascending project id so results and exports are reproducible byte-for-byte.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .ballots import Allocation
from .elections import DISTRIBUTIONAL_METHODS, ElectionConfig, Method, Project
from .errors import InstanceTooLargeError, MethodMismatchError

#: Default cap on projects * budget cell-steps for the exact rule.
DEFAULT_WORK_BOUND = 10**8


@dataclass(frozen=True)
class ScoreBoard:
    """Per-project scores; every election project appears, unsupported ones at 0."""

    scores: dict[str, int]
    ballot_count: int


@dataclass(frozen=True)
class TallyResult:
    """Scores plus the funded winner set under the monetary budget."""

    scoreboard: ScoreBoard
    projects: tuple[Project, ...]
    ordering: tuple[str, ...]
    winners: tuple[str, ...]
    winners_cost: int
    selection_rule: str


def tally(election: ElectionConfig, ballots: Iterable[Allocation]) -> ScoreBoard:
    """Aggregate ballots into a per-project scoreboard.

    Raises:
        MethodMismatchError: a ballot's method differs from the election's.
    """
    spec = election.method_spec
    scores = {p.id: 0 for p in election.projects}
    count = 0
    for ballot in ballots:
        if ballot.method is not spec.method:
            raise MethodMismatchError(
                f"{ballot.method.value} ballot in {spec.method.value} election"
            )
        count += 1
        _add_ballot(scores, ballot, spec.k)
    return ScoreBoard(scores=scores, ballot_count=count)


def _add_ballot(scores: dict[str, int], ballot: Allocation, k: int | None) -> None:
    method = ballot.method
    if method in DISTRIBUTIONAL_METHODS:
        for project, tokens in ballot.tokens.items():
            scores[project] += tokens
    elif method in (Method.K_APPROVAL, Method.KNAPSACK):
        for project in ballot.approved:
            scores[project] += 1
    elif method is Method.K_RANKING:
        assert k is not None
        for i, project in enumerate(ballot.ranking, start=1):
            scores[project] += k - i + 1
    else:  # pairwise: one point per pair won
        for winner, _loser in ballot.comparisons:
            scores[winner] += 1


def score_ordering(scoreboard: ScoreBoard) -> tuple[str, ...]:
    """All project ids sorted by score descending, id ascending."""
    return tuple(
        sorted(scoreboard.scores, key=lambda pid: (-scoreboard.scores[pid], pid))
    )


def select_winners_greedy(
    scoreboard: ScoreBoard, projects: Sequence[Project], monetary_budget: int
) -> TallyResult:
    """Walk projects in score order, funding each one that still fits.

    Skip-and-continue: an unaffordable project does not block cheaper,
    lower-scored ones behind it.
    """
    costs = {p.id: p.cost for p in projects}
    ordering = score_ordering(scoreboard)
    winners: list[str] = []
    remaining = monetary_budget
    for pid in ordering:
        if costs[pid] <= remaining:
            winners.append(pid)
            remaining -= costs[pid]
    return TallyResult(
        scoreboard=scoreboard,
        projects=tuple(projects),
        ordering=ordering,
        winners=tuple(winners),
        winners_cost=monetary_budget - remaining,
        selection_rule="greedy",
    )


def select_winners_exact(
    scoreboard: ScoreBoard,
    projects: Sequence[Project],
    monetary_budget: int,
    work_bound: int = DEFAULT_WORK_BOUND,
) -> TallyResult:
    """Score-maximizing knapsack over the monetary budget.

    Among equal-score winner sets the cheaper one wins; among equal
    score and cost, the lexicographically smallest id set. Intended for
    small-to-moderate instances; raises InstanceTooLargeError when
    projects * budget exceeds ``work_bound`` cell-steps.
    """
    ordered = sorted(projects, key=lambda p: p.id)
    n = len(ordered)
    budget = monetary_budget
    if n * (budget + 1) > work_bound:
        raise InstanceTooLargeError(f"{n} projects x budget {budget} > {work_bound}")

    scores = [scoreboard.scores.get(p.id, 0) for p in ordered]
    costs = [p.cost for p in ordered]

    # Phase 1: best (score, cost) reachable within each capacity.
    # The (score desc, cost asc) order is preserved under adding an item,
    # so a per-cell best is sound.
    dp: list[tuple[int, int]] = [(0, 0)] * (budget + 1)
    for i in range(n):
        cost_i, score_i = costs[i], scores[i]
        if cost_i > budget:
            continue
        for cap in range(budget, cost_i - 1, -1):
            base_score, base_cost = dp[cap - cost_i]
            cand = (base_score + score_i, base_cost + cost_i)
            cur = dp[cap]
            if cand[0] > cur[0] or (cand[0] == cur[0] and cand[1] < cur[1]):
                dp[cap] = cand
    target_score, target_cost = dp[budget]

    # Phase 2: lexicographically smallest id set hitting the target exactly.
    # Greedy over ascending ids: stop once the target is met (a qualifying
    # prefix beats any extension), otherwise include the smallest id that
    # still leaves an exactly-completable remainder.
    suffix_score = [0] * (n + 1)
    suffix_cost = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_score[i] = suffix_score[i + 1] + scores[i]
        suffix_cost[i] = suffix_cost[i + 1] + costs[i]

    memo: dict[tuple[int, int, int], bool] = {}

    def completable(i: int, score_left: int, cost_left: int) -> bool:
        if score_left == 0 and cost_left == 0:
            return True
        if (
            i >= n
            or score_left < 0
            or cost_left < 0
            or score_left > suffix_score[i]
            or cost_left > suffix_cost[i]
        ):
            return False
        key = (i, score_left, cost_left)
        cached = memo.get(key)
        if cached is None:
            cached = completable(i + 1, score_left, cost_left) or completable(
                i + 1, score_left - scores[i], cost_left - costs[i]
            )
            memo[key] = cached
        return cached

    winners: list[str] = []
    score_left, cost_left = target_score, target_cost
    for i in range(n):
        if score_left == 0 and cost_left == 0:
            break
        if completable(i + 1, score_left - scores[i], cost_left - costs[i]):
            winners.append(ordered[i].id)
            score_left -= scores[i]
            cost_left -= costs[i]
    assert score_left == 0 and cost_left == 0, "exact reconstruction failed"

    return TallyResult(
        scoreboard=scoreboard,
        projects=tuple(projects),
        ordering=score_ordering(scoreboard),
        winners=tuple(winners),
        winners_cost=target_cost,
        selection_rule="exact",
    )


def result_report(result: TallyResult) -> str:
    """CSV export, byte-stable for a given result.

    Columns: project_id,title,cost,score,rank,winner; rows follow the
    score ordering; LF newlines.
    """
    by_id = {p.id: p for p in result.projects}
    winners = set(result.winners)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["project_id", "title", "cost", "score", "rank", "winner"])
    for rank, pid in enumerate(result.ordering, start=1):
        project = by_id[pid]
        writer.writerow(
            [
                pid,
                project.title,
                project.cost,
                result.scoreboard.scores[pid],
                rank,
                "true" if pid in winners else "false",
            ]
        )
    return out.getvalue()
