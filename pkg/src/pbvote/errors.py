"""Exception hierarchy shared by the ballot engine, store, service and CLI.

Every error carries a stable machine-readable ``code`` that is surfaced
verbatim through the HTTP API and the CLI, so UI layers can key feedback
messages off it.
"""

from __future__ import annotations


class VotingError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str | None = None):
        super().__init__(message if message is not None else self.code)


class UnsupportedMethodError(VotingError):
    code = "unsupported_method"


class UnknownProjectError(VotingError):
    code = "unknown_project"


class MethodMismatchError(VotingError):
    code = "method_mismatch"


class BudgetExceededError(VotingError):
    code = "budget_exceeded"


class NegativeTokensError(VotingError):
    code = "negative_tokens"


class CapExceededError(VotingError):
    code = "cap_exceeded"


class OverBudgetError(VotingError):
    """An allocation's cost already exceeds its budget (corrupted state)."""

    code = "over_budget"


class TooManyApprovalsError(VotingError):
    code = "too_many_approvals"


class KnapsackOverBudgetError(VotingError):
    code = "knapsack_over_budget"


class SelfComparisonError(VotingError):
    code = "self_comparison"


class DuplicatePairError(VotingError):
    code = "duplicate_pair"


class DuplicateSelectionError(VotingError):
    code = "duplicate_selection"


class TooManySelectionsError(VotingError):
    code = "too_many_selections"


class InstanceTooLargeError(VotingError):
    code = "instance_too_large"


class UnknownElectionError(VotingError):
    code = "unknown_election"


class ElectionClosedError(VotingError):
    code = "election_closed"


class ConflictError(VotingError):
    code = "conflict"


class UnauthorizedError(VotingError):
    code = "unauthorized"


class CorruptLogError(VotingError):
    code = "corrupt_log"


class StorageFailureError(VotingError):
    code = "storage_failure"


class ConfigParseError(VotingError):
    """Structural problem in a configuration document.

    ``field`` names the offending field (dots for nesting, e.g.
    ``projects[2].cost``); None for document-level syntax errors.
    """

    code = "parse_error"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ValidationFailedError(VotingError):
    """A ballot or config failed semantic validation; carries the violations."""

    code = "validation_failed"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or self.code)
