"""Pure ballot state machine for all six methods.

Cumulative and quadratic ballots distribute integer tokens over projects;
a token count of t on one project costs t (cumulative) or t*t (quadratic)
out of the voter's token budget. ``apply_delta`` is the single validated
transition for those ballots: it can never produce an over-budget state.

All functions are pure and all values immutable; callers get new
allocations back, never mutated ones.
"""

from __future__ import annotations

import math
from collections.abc import Collection, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .elections import (
    APPROVAL_METHODS,
    DISTRIBUTIONAL_METHODS,
    ElectionConfig,
    Method,
    MethodSpec,
    Violation,
)
from .errors import (
    BudgetExceededError,
    CapExceededError,
    DuplicatePairError,
    DuplicateSelectionError,
    KnapsackOverBudgetError,
    MethodMismatchError,
    NegativeTokensError,
    OverBudgetError,
    SelfComparisonError,
    TooManyApprovalsError,
    TooManySelectionsError,
    UnknownProjectError,
    UnsupportedMethodError,
)


@dataclass(frozen=True)
class Allocation:
    """A voter's ballot content; exactly one payload is active per method.

    Canonical form: the token map never holds zero-token entries, so two
    allocations with the same token multiset compare equal.
    """

    method: Method
    tokens: Mapping[str, int] = field(default_factory=dict)
    approved: frozenset[str] = frozenset()
    ranking: tuple[str, ...] = ()
    comparisons: tuple[tuple[str, str], ...] = ()

    def is_empty(self) -> bool:
        return not (self.tokens or self.approved or self.ranking or self.comparisons)


@dataclass(frozen=True)
class BudgetStatus:
    """Spent/remaining cost units of a distributional ballot; spent + remaining == budget."""

    spent: int
    budget: int
    remaining: int


def empty_allocation(method: Method) -> Allocation:
    return Allocation(method=method)


def token_allocation(method: Method, tokens: Mapping[str, int]) -> Allocation:
    """Build a cumulative/quadratic allocation in canonical form."""
    _require_distributional(method)
    cleaned = {}
    for project, count in tokens.items():
        if count < 0:
            raise NegativeTokensError(f"{project}: {count} tokens")
        if count > 0:
            cleaned[project] = count
    return Allocation(method=method, tokens=cleaned)


def approval_allocation(method: Method, approved: Iterable[str]) -> Allocation:
    if method not in APPROVAL_METHODS:
        raise UnsupportedMethodError(method.value)
    return Allocation(method=method, approved=frozenset(approved))


def ranking_allocation(ranking: Sequence[str]) -> Allocation:
    if len(set(ranking)) != len(ranking):
        raise DuplicateSelectionError()
    return Allocation(method=Method.K_RANKING, ranking=tuple(ranking))


def pairwise_allocation(comparisons: Iterable[tuple[str, str]]) -> Allocation:
    pairs = tuple((str(w), str(l)) for w, l in comparisons)
    seen: set[frozenset[str]] = set()
    for winner, loser in pairs:
        if winner == loser:
            raise SelfComparisonError(winner)
        key = frozenset((winner, loser))
        if key in seen:
            raise DuplicatePairError(f"{winner}/{loser}")
        seen.add(key)
    return Allocation(method=Method.PAIRWISE, comparisons=pairs)


def token_cost(spec: MethodSpec, tokens: int) -> int:
    """Cost of placing ``tokens`` tokens on one project.

    Linear for cumulative; quadratic voting makes strong support
    disproportionately expensive: t tokens cost t*t.
    """
    if tokens < 0:
        raise NegativeTokensError(str(tokens))
    if spec.method is Method.CUMULATIVE:
        return tokens
    if spec.method is Method.QUADRATIC:
        return tokens * tokens
    raise UnsupportedMethodError(spec.method.value)


def ballot_cost(spec: MethodSpec, alloc: Allocation) -> int:
    """Total cost of an allocation under the method's cost rule."""
    _check_method(spec, alloc)
    _require_distributional(spec.method)
    return sum(token_cost(spec, t) for t in alloc.tokens.values())


def budget_status(spec: MethodSpec, alloc: Allocation) -> BudgetStatus:
    """Spent and remaining cost units for a within-budget allocation.

    Raises:
        OverBudgetError: the allocation already costs more than the budget,
            which signals corrupted state; ``apply_delta`` never produces it.
    """
    spent = ballot_cost(spec, alloc)
    budget = spec.token_budget or 0
    if spent > budget:
        raise OverBudgetError(f"{spent} > {budget}")
    return BudgetStatus(spent=spent, budget=budget, remaining=budget - spent)


def max_affordable(
    spec: MethodSpec, alloc: Allocation, project: str, project_ids: Collection[str]
) -> int:
    """Largest token count the project could hold without busting the budget.

    Replacing the project's current tokens with the returned value keeps
    the ballot within ``token_budget`` and ``per_project_cap``; one more
    token would not. The UI uses this to enable/disable "+" controls.
    """
    _check_method(spec, alloc)
    _require_distributional(spec.method)
    if project not in project_ids:
        raise UnknownProjectError(project)
    budget = spec.token_budget or 0
    others = sum(
        token_cost(spec, t) for p, t in alloc.tokens.items() if p != project
    )
    headroom = budget - others
    if spec.method is Method.CUMULATIVE:
        best = headroom
    else:
        best = _isqrt(headroom)
    if spec.per_project_cap is not None:
        best = min(best, spec.per_project_cap)
    return max(best, 0)


def apply_delta(
    spec: MethodSpec,
    alloc: Allocation,
    project: str,
    delta: int,
    project_ids: Collection[str],
) -> Allocation:
    """Add or remove tokens on one project, keeping the ballot within budget.

    This is the only mutation path for distributional ballots; every UI
    interaction (button, slider, direct entry) reduces to one delta. The
    input allocation is never mutated.

    Raises:
        UnknownProjectError: project not in the election.
        NegativeTokensError: the delta would take the project below zero.
        CapExceededError: the delta would exceed ``per_project_cap``.
        BudgetExceededError: the result would cost more than the budget.
    """
    _check_method(spec, alloc)
    _require_distributional(spec.method)
    if project not in project_ids:
        raise UnknownProjectError(project)

    current = alloc.tokens.get(project, 0)
    updated = current + delta
    if updated < 0:
        raise NegativeTokensError(f"{project}: {current} {delta:+d}")
    if spec.per_project_cap is not None and updated > spec.per_project_cap:
        raise CapExceededError(f"{project}: {updated} > cap {spec.per_project_cap}")

    tokens = dict(alloc.tokens)
    if updated == 0:
        tokens.pop(project, None)
    else:
        tokens[project] = updated

    budget = spec.token_budget or 0
    cost = sum(token_cost(spec, t) for t in tokens.values())
    if cost > budget:
        raise BudgetExceededError(f"cost {cost} > budget {budget}")
    return Allocation(method=spec.method, tokens=tokens)


def apply_approval(
    spec: MethodSpec,
    alloc: Allocation,
    project: str,
    approve: bool,
    election: ElectionConfig,
) -> Allocation:
    """Add or remove one project from an approval-style ballot.

    Enforces the live-editing limits: at most k approvals for k-approval,
    and the monetary budget for knapsack.
    """
    _check_method(spec, alloc)
    if spec.method not in APPROVAL_METHODS:
        raise UnsupportedMethodError(spec.method.value)
    if project not in election.project_ids():
        raise UnknownProjectError(project)

    if not approve:
        return Allocation(method=spec.method, approved=alloc.approved - {project})
    if project in alloc.approved:
        return alloc

    approved = alloc.approved | {project}
    if spec.method is Method.K_APPROVAL and spec.k is not None and len(approved) > spec.k:
        raise TooManyApprovalsError(f"{len(approved)} > k={spec.k}")
    if spec.method is Method.KNAPSACK:
        total = _approved_cost(approved, election)
        if total > election.monetary_budget:
            raise KnapsackOverBudgetError(f"{total} > {election.monetary_budget}")
    return Allocation(method=spec.method, approved=approved)


def apply_comparison(
    spec: MethodSpec,
    alloc: Allocation,
    winner: str,
    loser: str,
    project_ids: Collection[str],
) -> Allocation:
    """Record one head-to-head outcome on a pairwise ballot."""
    _check_method(spec, alloc)
    if spec.method is not Method.PAIRWISE:
        raise UnsupportedMethodError(spec.method.value)
    for project in (winner, loser):
        if project not in project_ids:
            raise UnknownProjectError(project)
    if winner == loser:
        raise SelfComparisonError(winner)
    if any(frozenset((w, l)) == frozenset((winner, loser)) for w, l in alloc.comparisons):
        raise DuplicatePairError(f"{winner}/{loser}")
    return Allocation(method=spec.method, comparisons=alloc.comparisons + ((winner, loser),))


def build_ranking(steps: Sequence[str], k: int) -> Allocation:
    """Turn the ordered selection steps of the ranking phase into a ballot.

    The k-ranking flow is an approval interface followed by an ordering
    step; the ranking equals the order in which projects were selected.
    """
    if len(steps) > k:
        raise TooManySelectionsError(f"{len(steps)} > k={k}")
    seen: set[str] = set()
    for step in steps:
        if step in seen:
            raise DuplicateSelectionError(step)
        seen.add(step)
    return Allocation(method=Method.K_RANKING, ranking=tuple(steps))


def validate_ballot(
    spec: MethodSpec, alloc: Allocation, election: ElectionConfig
) -> list[Violation]:
    """Full-ballot validation; an empty list means the ballot is submittable.

    Violations are data: they become the feedback messages shown to voters.
    """
    _check_method(spec, alloc)
    violations: list[Violation] = []
    known = election.project_ids()

    for project in _referenced_projects(alloc):
        if project not in known:
            violations.append(Violation("unknown_project", subject=project))

    if alloc.is_empty():
        violations.append(Violation("empty_ballot"))

    method = spec.method
    if method in DISTRIBUTIONAL_METHODS:
        budget = spec.token_budget or 0
        cost = sum(token_cost(spec, t) for t in alloc.tokens.values())
        if cost > budget:
            violations.append(
                Violation("budget_exceeded", detail=f"{cost} > {budget}")
            )
        if any(t < 0 for t in alloc.tokens.values()):
            violations.append(Violation("negative_tokens"))
        if spec.per_project_cap is not None:
            for project, t in sorted(alloc.tokens.items()):
                if t > spec.per_project_cap:
                    violations.append(
                        Violation("cap_exceeded", subject=project, detail=f"{t} > {spec.per_project_cap}")
                    )
    elif method is Method.K_APPROVAL:
        if spec.k is not None and len(alloc.approved) > spec.k:
            violations.append(
                Violation("too_many_approvals", detail=f"{len(alloc.approved)} > {spec.k}")
            )
    elif method is Method.K_RANKING:
        if spec.k is not None and len(alloc.ranking) > spec.k:
            violations.append(
                Violation("too_many_ranked", detail=f"{len(alloc.ranking)} > {spec.k}")
            )
        if len(set(alloc.ranking)) != len(alloc.ranking):
            violations.append(Violation("duplicate_ranking_entry"))
    elif method is Method.KNAPSACK:
        total = _approved_cost(alloc.approved, election)
        if total > election.monetary_budget:
            violations.append(
                Violation("knapsack_over_budget", detail=f"{total} > {election.monetary_budget}")
            )
    elif method is Method.PAIRWISE:
        seen: set[frozenset[str]] = set()
        for winner, loser in alloc.comparisons:
            if winner == loser:
                violations.append(Violation("self_comparison", subject=winner))
            key = frozenset((winner, loser))
            if key in seen:
                violations.append(Violation("duplicate_pair", subject=f"{winner}/{loser}"))
            seen.add(key)

    return violations


# --- wire form --------------------------------------------------------------

_PAYLOAD_FIELD = {
    Method.CUMULATIVE: "tokens",
    Method.QUADRATIC: "tokens",
    Method.K_APPROVAL: "approved",
    Method.KNAPSACK: "approved",
    Method.K_RANKING: "ranking",
    Method.PAIRWISE: "comparisons",
}


def allocation_to_wire(alloc: Allocation) -> dict:
    """JSON-ready form: ``{method, <payload field>}`` with exactly one payload."""
    payload = _PAYLOAD_FIELD[alloc.method]
    wire: dict = {"method": alloc.method.value}
    if payload == "tokens":
        wire["tokens"] = dict(sorted(alloc.tokens.items()))
    elif payload == "approved":
        wire["approved"] = sorted(alloc.approved)
    elif payload == "ranking":
        wire["ranking"] = list(alloc.ranking)
    else:
        wire["comparisons"] = [list(pair) for pair in alloc.comparisons]
    return wire


def allocation_from_wire(wire: Mapping) -> Allocation:
    """Strict decode of the wire form; rejects mismatched payload fields."""
    try:
        method = Method(wire["method"])
    except (KeyError, ValueError) as exc:
        raise MethodMismatchError(f"bad method field: {wire.get('method')!r}") from exc

    payload = _PAYLOAD_FIELD[method]
    extra = set(wire) - {"method", payload}
    if extra:
        raise MethodMismatchError(f"unexpected payload fields for {method.value}: {sorted(extra)}")

    if payload == "tokens":
        tokens = wire.get("tokens", {})
        if not isinstance(tokens, Mapping) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in tokens.values()
        ):
            raise MethodMismatchError("tokens must map project ids to integers")
        return token_allocation(method, {str(k): v for k, v in tokens.items()})
    if payload == "approved":
        return approval_allocation(method, (str(p) for p in wire.get("approved", [])))
    if payload == "ranking":
        return ranking_allocation([str(p) for p in wire.get("ranking", [])])
    return pairwise_allocation(
        (pair[0], pair[1]) for pair in wire.get("comparisons", [])
    )


# --- internals --------------------------------------------------------------

def _require_distributional(method: Method) -> None:
    if method not in DISTRIBUTIONAL_METHODS:
        raise UnsupportedMethodError(method.value)


def _check_method(spec: MethodSpec, alloc: Allocation) -> None:
    if spec.method is not alloc.method:
        raise MethodMismatchError(f"{alloc.method.value} ballot under {spec.method.value} spec")


def _referenced_projects(alloc: Allocation) -> list[str]:
    if alloc.method in DISTRIBUTIONAL_METHODS:
        return sorted(alloc.tokens)
    if alloc.method in APPROVAL_METHODS:
        return sorted(alloc.approved)
    if alloc.method is Method.K_RANKING:
        return list(alloc.ranking)
    return [p for pair in alloc.comparisons for p in pair]


def _approved_cost(approved: Collection[str], election: ElectionConfig) -> int:
    total = 0
    for project in approved:
        p = election.project_by_id(project)
        if p is not None:
            total += p.cost
    return total


def _isqrt(value: int) -> int:
    return -1 if value < 0 else math.isqrt(value)
