"""Ballot engine: cost rules, editing transitions, validation.

The max_affordable checks use an independent brute-force oracle (try
every token count up to the budget) rather than trusting the closed form.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from pbvote import ballots
from pbvote.ballots import (
    Allocation,
    apply_approval,
    apply_comparison,
    apply_delta,
    allocation_from_wire,
    allocation_to_wire,
    ballot_cost,
    budget_status,
    build_ranking,
    empty_allocation,
    max_affordable,
    pairwise_allocation,
    ranking_allocation,
    token_allocation,
    token_cost,
    validate_ballot,
)
from pbvote.elections import Method, MethodSpec
from pbvote.errors import (
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

from conftest import make_election

IDS = ("p1", "p2", "p3")


def spec_for(method: Method, budget: int = 10, cap: int | None = None) -> MethodSpec:
    return MethodSpec(method=method, token_budget=budget, per_project_cap=cap)


def brute_force_max_affordable(spec: MethodSpec, alloc: Allocation, project: str) -> int:
    """Independent oracle: largest t whose substituted ballot stays affordable."""
    best = 0
    for t in range(0, (spec.token_budget or 0) + 1):
        if spec.per_project_cap is not None and t > spec.per_project_cap:
            break
        tokens = {p: v for p, v in alloc.tokens.items() if p != project}
        if t:
            tokens[project] = t
        cost = sum(token_cost(spec, v) for v in tokens.values())
        if cost <= (spec.token_budget or 0):
            best = t
    return best


class TestTokenCost:
    def test_cumulative_is_linear(self):
        assert token_cost(spec_for(Method.CUMULATIVE), 3) == 3

    def test_quadratic_zero(self):
        assert token_cost(spec_for(Method.QUADRATIC), 0) == 0

    def test_quadratic_three_tokens_cost_nine(self):
        assert token_cost(spec_for(Method.QUADRATIC), 3) == 9

    @pytest.mark.parametrize(
        "method", [Method.K_APPROVAL, Method.K_RANKING, Method.KNAPSACK, Method.PAIRWISE]
    )
    def test_non_distributional_methods_unsupported(self, method):
        with pytest.raises(UnsupportedMethodError):
            token_cost(MethodSpec(method=method), 1)

    @given(st.integers(min_value=0, max_value=1000))
    def test_monotone_nondecreasing(self, t):
        for method in (Method.CUMULATIVE, Method.QUADRATIC):
            spec = spec_for(method)
            assert token_cost(spec, t + 1) >= token_cost(spec, t)


class TestBallotCost:
    def test_cumulative_sums_tokens(self):
        spec = spec_for(Method.CUMULATIVE)
        assert ballot_cost(spec, token_allocation(spec.method, {"p1": 2, "p2": 1})) == 3

    def test_quadratic_sums_squares(self):
        spec = spec_for(Method.QUADRATIC)
        assert ballot_cost(spec, token_allocation(spec.method, {"p1": 2, "p2": 1})) == 5

    def test_empty_ballot_costs_nothing(self):
        spec = spec_for(Method.QUADRATIC)
        assert ballot_cost(spec, empty_allocation(spec.method)) == 0


class TestBudgetStatus:
    def test_cumulative_status(self):
        spec = spec_for(Method.CUMULATIVE, 10)
        status = budget_status(spec, token_allocation(spec.method, {"p1": 4}))
        assert (status.spent, status.budget, status.remaining) == (4, 10, 6)

    def test_quadratic_status(self):
        spec = spec_for(Method.QUADRATIC, 10)
        status = budget_status(spec, token_allocation(spec.method, {"p1": 3}))
        assert (status.spent, status.remaining) == (9, 1)

    def test_empty_status(self):
        spec = spec_for(Method.QUADRATIC, 10)
        status = budget_status(spec, empty_allocation(spec.method))
        assert (status.spent, status.remaining) == (0, 10)

    def test_over_budget_state_is_an_error(self):
        spec = spec_for(Method.QUADRATIC, 4)
        corrupted = token_allocation(spec.method, {"p1": 3})
        with pytest.raises(OverBudgetError):
            budget_status(spec, corrupted)


class TestMaxAffordable:
    def test_quadratic_example_against_oracle(self):
        spec = spec_for(Method.QUADRATIC, 10)
        alloc = token_allocation(spec.method, {"p1": 1, "p2": 1})
        assert brute_force_max_affordable(spec, alloc, "p1") == 3
        assert max_affordable(spec, alloc, "p1", IDS) == 3

    def test_cumulative_example_against_oracle(self):
        spec = spec_for(Method.CUMULATIVE, 10)
        alloc = token_allocation(spec.method, {"p1": 4, "p2": 3})
        assert brute_force_max_affordable(spec, alloc, "p2") == 6
        assert max_affordable(spec, alloc, "p2", IDS) == 6

    def test_quadratic_budget_four_single_token_limit(self):
        # at small budgets two projects cannot hold two tokens each
        spec = spec_for(Method.QUADRATIC, 4)
        alloc = token_allocation(spec.method, {"p2": 1})
        assert brute_force_max_affordable(spec, alloc, "p1") == 1
        assert max_affordable(spec, alloc, "p1", IDS) == 1

    def test_unknown_project(self):
        spec = spec_for(Method.QUADRATIC, 10)
        with pytest.raises(UnknownProjectError):
            max_affordable(spec, empty_allocation(spec.method), "nope", IDS)

    def test_respects_per_project_cap(self):
        spec = spec_for(Method.CUMULATIVE, 10, cap=2)
        assert max_affordable(spec, empty_allocation(spec.method), "p1", IDS) == 2

    @given(
        method=st.sampled_from([Method.CUMULATIVE, Method.QUADRATIC]),
        budget=st.integers(min_value=1, max_value=40),
        cap=st.one_of(st.none(), st.integers(min_value=1, max_value=40)),
        tokens=st.dictionaries(st.sampled_from(IDS), st.integers(min_value=0, max_value=6)),
        project=st.sampled_from(IDS),
    )
    def test_matches_brute_force_oracle(self, method, budget, cap, tokens, project):
        if cap is not None:
            cap = min(cap, budget)
        spec = spec_for(method, budget, cap)
        if cap is not None:
            tokens = {p: min(t, cap) for p, t in tokens.items()}
        alloc = token_allocation(method, tokens)
        if ballot_cost(spec, alloc) > budget:
            return  # oracle and engine both require a within-budget start
        assert max_affordable(spec, alloc, project, IDS) == brute_force_max_affordable(
            spec, alloc, project
        )


class TestApplyDelta:
    def test_add_tokens_within_budget(self):
        spec = spec_for(Method.QUADRATIC, 10)
        alloc = token_allocation(spec.method, {"p1": 1})
        updated = apply_delta(spec, alloc, "p1", +2, IDS)
        assert dict(updated.tokens) == {"p1": 3}
        assert ballot_cost(spec, updated) == 9
        assert dict(alloc.tokens) == {"p1": 1}  # input untouched

    def test_budget_exceeded(self):
        spec = spec_for(Method.QUADRATIC, 10)
        alloc = token_allocation(spec.method, {"p1": 3})
        with pytest.raises(BudgetExceededError):
            apply_delta(spec, alloc, "p2", +2, IDS)  # 9 + 4 > 10

    def test_removal_to_zero_drops_entry(self):
        spec = spec_for(Method.CUMULATIVE, 10)
        alloc = token_allocation(spec.method, {"p1": 2})
        updated = apply_delta(spec, alloc, "p1", -2, IDS)
        assert updated == empty_allocation(Method.CUMULATIVE)
        assert budget_status(spec, updated).remaining == 10

    def test_negative_tokens(self):
        spec = spec_for(Method.CUMULATIVE, 10)
        alloc = token_allocation(spec.method, {"p1": 1})
        with pytest.raises(NegativeTokensError):
            apply_delta(spec, alloc, "p1", -2, IDS)

    def test_cap_exceeded(self):
        spec = spec_for(Method.CUMULATIVE, 10, cap=3)
        alloc = token_allocation(spec.method, {"p1": 3})
        with pytest.raises(CapExceededError):
            apply_delta(spec, alloc, "p1", +1, IDS)

    def test_unknown_project(self):
        spec = spec_for(Method.CUMULATIVE, 10)
        with pytest.raises(UnknownProjectError):
            apply_delta(spec, empty_allocation(spec.method), "ghost", +1, IDS)

    def test_unsupported_method(self):
        with pytest.raises(UnsupportedMethodError):
            apply_delta(
                MethodSpec(method=Method.K_APPROVAL, k=2),
                Allocation(method=Method.K_APPROVAL),
                "p1",
                +1,
                IDS,
            )


# --- engine-wide properties ---------------------------------------------------

delta_steps = st.lists(
    st.tuples(st.sampled_from(IDS), st.integers(min_value=-4, max_value=4)),
    max_size=40,
)


@given(
    method=st.sampled_from([Method.CUMULATIVE, Method.QUADRATIC]),
    budget=st.integers(min_value=1, max_value=50),
    steps=delta_steps,
)
def test_budget_safety_under_any_delta_sequence(method, budget, steps):
    spec = spec_for(method, budget)
    alloc = empty_allocation(method)
    for project, delta in steps:
        try:
            alloc = apply_delta(spec, alloc, project, delta, IDS)
        except (BudgetExceededError, NegativeTokensError):
            continue
        assert ballot_cost(spec, alloc) <= budget


@given(
    method=st.sampled_from([Method.CUMULATIVE, Method.QUADRATIC]),
    budget=st.integers(min_value=1, max_value=50),
    steps=delta_steps,
)
def test_tokens_are_always_removable(method, budget, steps):
    """No dead states: fully clearing any project always succeeds."""
    spec = spec_for(method, budget)
    alloc = empty_allocation(method)
    for project, delta in steps:
        try:
            alloc = apply_delta(spec, alloc, project, delta, IDS)
        except (BudgetExceededError, NegativeTokensError):
            pass
    for project in list(alloc.tokens):
        cleared = apply_delta(spec, alloc, project, -alloc.tokens[project], IDS)
        assert project not in cleared.tokens


@given(st.dictionaries(st.sampled_from(IDS), st.integers(min_value=0, max_value=10)))
def test_quadratic_cost_dominates_cumulative(tokens):
    big_budget = 10_000
    cumulative = ballot_cost(
        spec_for(Method.CUMULATIVE, big_budget), token_allocation(Method.CUMULATIVE, tokens)
    )
    quadratic = ballot_cost(
        spec_for(Method.QUADRATIC, big_budget), token_allocation(Method.QUADRATIC, tokens)
    )
    if any(t >= 2 for t in tokens.values()):
        assert quadratic > cumulative
    else:
        assert quadratic == cumulative


@given(
    method=st.sampled_from([Method.CUMULATIVE, Method.QUADRATIC]),
    budget=st.integers(min_value=1, max_value=50),
    steps=delta_steps,
)
def test_no_operation_leaves_zero_entries(method, budget, steps):
    spec = spec_for(method, budget)
    alloc = empty_allocation(method)
    for project, delta in steps:
        try:
            alloc = apply_delta(spec, alloc, project, delta, IDS)
        except (BudgetExceededError, NegativeTokensError):
            continue
        assert all(t > 0 for t in alloc.tokens.values())


def test_equal_token_multisets_compare_equal():
    a = token_allocation(Method.CUMULATIVE, {"p1": 2, "p2": 0})
    b = token_allocation(Method.CUMULATIVE, {"p1": 2})
    assert a == b


@given(
    method=st.sampled_from([Method.CUMULATIVE, Method.QUADRATIC]),
    budget=st.integers(min_value=1, max_value=50),
    cap=st.one_of(st.none(), st.integers(min_value=1, max_value=50)),
    tokens=st.dictionaries(st.sampled_from(IDS), st.integers(min_value=1, max_value=5)),
    project=st.sampled_from(IDS),
)
def test_max_affordable_is_tight(method, budget, cap, tokens, project):
    if cap is not None:
        cap = min(cap, budget)
        tokens = {p: min(t, cap) for p, t in tokens.items()}
    spec = spec_for(method, budget, cap)
    alloc = token_allocation(method, tokens)
    if ballot_cost(spec, alloc) > budget:
        return
    current = alloc.tokens.get(project, 0)
    limit = max_affordable(spec, alloc, project, IDS)
    at_limit = apply_delta(spec, alloc, project, limit - current, IDS)
    assert ballot_cost(spec, at_limit) <= budget
    with pytest.raises((BudgetExceededError, CapExceededError)):
        apply_delta(spec, alloc, project, limit - current + 1, IDS)


@given(
    method=st.sampled_from([Method.CUMULATIVE, Method.QUADRATIC]),
    budget=st.integers(min_value=10, max_value=60),
    steps=st.lists(
        st.tuples(st.sampled_from(IDS), st.integers(min_value=-2, max_value=2)), max_size=10
    ),
    seed=st.randoms(use_true_random=False),
)
@settings(max_examples=60)
def test_delta_order_independence(method, budget, steps, seed):
    """Any error-free reordering of the same deltas lands on the same ballot."""
    spec = spec_for(method, budget)

    def fold(sequence):
        alloc = empty_allocation(method)
        for project, delta in sequence:
            alloc = apply_delta(spec, alloc, project, delta, IDS)
        return alloc

    try:
        expected = fold(steps)
    except (BudgetExceededError, NegativeTokensError):
        return
    shuffled = list(steps)
    seed.shuffle(shuffled)
    try:
        reordered = fold(shuffled)
    except (BudgetExceededError, NegativeTokensError):
        return  # this order hit an intermediate error; property only covers clean orders
    assert reordered == expected


class TestValidateBallot:
    def test_knapsack_over_budget(self):
        election = make_election(Method.KNAPSACK, costs=(60, 50), monetary_budget=100)
        alloc = ballots.approval_allocation(Method.KNAPSACK, {"p1", "p2"})
        violations = validate_ballot(election.method_spec, alloc, election)
        assert [v.code for v in violations] == ["knapsack_over_budget"]
        assert violations[0].detail == "110 > 100"

    def test_partial_ranking_is_ok(self):
        election = make_election(Method.K_RANKING, k=3)
        alloc = ranking_allocation(["p1", "p2"])
        assert validate_ballot(election.method_spec, alloc, election) == []

    def test_quadratic_budget_exceeded(self):
        election = make_election(Method.QUADRATIC, token_budget=9)
        alloc = token_allocation(Method.QUADRATIC, {"p1": 3, "p2": 1})
        violations = validate_ballot(election.method_spec, alloc, election)
        assert [v.code for v in violations] == ["budget_exceeded"]
        assert violations[0].detail == "10 > 9"

    def test_empty_ballot_not_submittable(self):
        election = make_election(Method.CUMULATIVE, token_budget=10)
        violations = validate_ballot(
            election.method_spec, empty_allocation(Method.CUMULATIVE), election
        )
        assert [v.code for v in violations] == ["empty_ballot"]

    def test_unknown_project_flagged(self):
        election = make_election(Method.K_APPROVAL, k=2)
        alloc = ballots.approval_allocation(Method.K_APPROVAL, {"p1", "p9"})
        codes = [v.code for v in validate_ballot(election.method_spec, alloc, election)]
        assert "unknown_project" in codes

    def test_too_many_approvals(self):
        election = make_election(Method.K_APPROVAL, k=2)
        alloc = ballots.approval_allocation(Method.K_APPROVAL, {"p1", "p2", "p3"})
        codes = [v.code for v in validate_ballot(election.method_spec, alloc, election)]
        assert "too_many_approvals" in codes

    def test_pairwise_duplicate_pair(self):
        election = make_election(Method.PAIRWISE)
        alloc = Allocation(
            method=Method.PAIRWISE, comparisons=(("p1", "p2"), ("p2", "p1"))
        )
        codes = [v.code for v in validate_ballot(election.method_spec, alloc, election)]
        assert "duplicate_pair" in codes

    def test_method_mismatch_is_a_fault(self):
        election = make_election(Method.CUMULATIVE, token_budget=10)
        with pytest.raises(MethodMismatchError):
            validate_ballot(election.method_spec, empty_allocation(Method.KNAPSACK), election)


class TestBuildRanking:
    def test_order_preserved(self):
        alloc = build_ranking(["p2", "p1"], k=3)
        assert alloc.ranking == ("p2", "p1")

    def test_duplicate_selection(self):
        with pytest.raises(DuplicateSelectionError):
            build_ranking(["p1", "p1"], k=3)

    def test_too_many_selections(self):
        with pytest.raises(TooManySelectionsError):
            build_ranking(["p1", "p2", "p3", "p4"], k=3)


class TestApprovalAndComparisonEdits:
    def test_approve_then_unapprove(self):
        election = make_election(Method.K_APPROVAL, k=2)
        spec = election.method_spec
        alloc = apply_approval(spec, empty_allocation(Method.K_APPROVAL), "p1", True, election)
        assert alloc.approved == {"p1"}
        alloc = apply_approval(spec, alloc, "p1", False, election)
        assert alloc.approved == frozenset()

    def test_approval_limit_enforced_live(self):
        election = make_election(Method.K_APPROVAL, k=1)
        spec = election.method_spec
        alloc = apply_approval(spec, empty_allocation(Method.K_APPROVAL), "p1", True, election)
        with pytest.raises(TooManyApprovalsError):
            apply_approval(spec, alloc, "p2", True, election)

    def test_knapsack_budget_enforced_live(self):
        election = make_election(Method.KNAPSACK, costs=(60, 50), monetary_budget=100)
        spec = election.method_spec
        alloc = apply_approval(spec, empty_allocation(Method.KNAPSACK), "p1", True, election)
        with pytest.raises(KnapsackOverBudgetError):
            apply_approval(spec, alloc, "p2", True, election)

    def test_comparison_rules(self):
        election = make_election(Method.PAIRWISE)
        spec = election.method_spec
        alloc = apply_comparison(spec, empty_allocation(Method.PAIRWISE), "p1", "p2", IDS)
        with pytest.raises(DuplicatePairError):
            apply_comparison(spec, alloc, "p2", "p1", IDS)
        with pytest.raises(SelfComparisonError):
            apply_comparison(spec, alloc, "p3", "p3", IDS)


class TestWireForm:
    @pytest.mark.parametrize(
        "alloc",
        [
            token_allocation(Method.CUMULATIVE, {"p2": 1, "p1": 4}),
            token_allocation(Method.QUADRATIC, {"p3": 2}),
            ballots.approval_allocation(Method.K_APPROVAL, {"p1", "p3"}),
            ballots.approval_allocation(Method.KNAPSACK, {"p2"}),
            ranking_allocation(["p3", "p1"]),
            pairwise_allocation([("p1", "p2"), ("p3", "p2")]),
        ],
    )
    def test_round_trip(self, alloc):
        assert allocation_from_wire(allocation_to_wire(alloc)) == alloc

    def test_mismatched_payload_rejected(self):
        with pytest.raises(MethodMismatchError):
            allocation_from_wire({"method": "cumulative", "approved": ["p1"]})

    def test_bad_method_rejected(self):
        with pytest.raises(MethodMismatchError):
            allocation_from_wire({"method": "majority"})
