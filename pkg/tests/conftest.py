"""Shared builders for election fixtures."""

from __future__ import annotations

import pytest

from pbvote.elections import ElectionConfig, Method, MethodSpec, Project, UIVariant


def make_projects(*costs: int) -> tuple[Project, ...]:
    return tuple(
        Project(id=f"p{i + 1}", title=f"Project {i + 1}", cost=cost)
        for i, cost in enumerate(costs)
    )


def make_election(
    method: Method,
    *,
    election_id: str = "e1",
    costs: tuple[int, ...] = (60, 50, 40),
    monetary_budget: int = 100,
    token_budget: int | None = None,
    k: int | None = None,
    per_project_cap: int | None = None,
    ui_variant: UIVariant = UIVariant.TOP_AND_SIDE_BAR,
    open: bool = True,
) -> ElectionConfig:
    return ElectionConfig(
        id=election_id,
        name=f"{method.value} test election",
        projects=make_projects(*costs),
        monetary_budget=monetary_budget,
        method_spec=MethodSpec(
            method=method,
            token_budget=token_budget,
            k=k,
            per_project_cap=per_project_cap,
        ),
        ui_variant=ui_variant,
        open=open,
    )


@pytest.fixture
def cumulative_election() -> ElectionConfig:
    return make_election(Method.CUMULATIVE, token_budget=10)


@pytest.fixture
def quadratic_election() -> ElectionConfig:
    return make_election(Method.QUADRATIC, token_budget=10)
