"""Participatory-budgeting voting core.

Distributional (cumulative, quadratic) and classic (k-approval, k-ranking,
knapsack, pairwise) ballots with token-budget cost accounting, live ballot
editing, tallying, budget-constrained winner selection, an append-only vote
store, an HTTP election service and an operator CLI.
"""

from .ballots import (
    Allocation,
    BudgetStatus,
    apply_delta,
    ballot_cost,
    budget_status,
    build_ranking,
    max_affordable,
    token_cost,
    validate_ballot,
)
from .elections import (
    ElectionConfig,
    Method,
    MethodSpec,
    Project,
    UIVariant,
    Violation,
    parse_config,
    serialize_config,
    validate_config,
)
from .service import ElectionService, SessionState
from .store import VoteRecord, VoteStore
from .tally import (
    ScoreBoard,
    TallyResult,
    result_report,
    select_winners_exact,
    select_winners_greedy,
    tally,
)

__all__ = [
    "Allocation",
    "BudgetStatus",
    "ElectionConfig",
    "ElectionService",
    "Method",
    "MethodSpec",
    "Project",
    "ScoreBoard",
    "SessionState",
    "TallyResult",
    "UIVariant",
    "Violation",
    "VoteRecord",
    "VoteStore",
    "apply_delta",
    "ballot_cost",
    "budget_status",
    "build_ranking",
    "max_affordable",
    "parse_config",
    "result_report",
    "select_winners_exact",
    "select_winners_greedy",
    "serialize_config",
    "tally",
    "token_cost",
    "validate_ballot",
    "validate_config",
]

__version__ = "0.1.0"
