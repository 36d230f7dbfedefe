"""Seeded generation of valid synthetic ballots for demos and tests.

Distributional ballots are grown one ``apply_delta`` at a time, so every
generated ballot is within budget by construction. The same seed always
yields the same ballots.
"""

from __future__ import annotations

import random

from . import ballots
from .ballots import Allocation
from .elections import DISTRIBUTIONAL_METHODS, ElectionConfig, Method
from .errors import VotingError


def generate_allocation(election: ElectionConfig, rng: random.Random) -> Allocation:
    """One valid random ballot for the election's method."""
    method = election.method_spec.method
    if method in DISTRIBUTIONAL_METHODS:
        return _distributional(election, rng)
    if method is Method.K_APPROVAL:
        ids = sorted(election.project_ids())
        size = rng.randint(1, election.method_spec.k or 1)
        return ballots.approval_allocation(method, rng.sample(ids, size))
    if method is Method.K_RANKING:
        ids = sorted(election.project_ids())
        size = rng.randint(1, election.method_spec.k or 1)
        return ballots.build_ranking(rng.sample(ids, size), election.method_spec.k or 1)
    if method is Method.KNAPSACK:
        return _knapsack(election, rng)
    return _pairwise(election, rng)


def _distributional(election: ElectionConfig, rng: random.Random) -> Allocation:
    spec = election.method_spec
    ids = sorted(election.project_ids())
    alloc = ballots.empty_allocation(spec.method)
    # aim to spend a random fraction of the budget, at least one token
    target = rng.randint(1, spec.token_budget or 1)
    while ballots.ballot_cost(spec, alloc) < target:
        open_ids = [
            p
            for p in ids
            if ballots.max_affordable(spec, alloc, p, ids) > alloc.tokens.get(p, 0)
        ]
        if not open_ids:
            break
        alloc = ballots.apply_delta(spec, alloc, rng.choice(open_ids), +1, ids)
    return alloc


def _knapsack(election: ElectionConfig, rng: random.Random) -> Allocation:
    affordable = sorted(
        p.id for p in election.projects if p.cost <= election.monetary_budget
    )
    if not affordable:
        raise VotingError("no project fits the monetary budget")
    order = list(affordable)
    rng.shuffle(order)
    alloc = ballots.empty_allocation(Method.KNAPSACK)
    for pid in order:
        if alloc.approved and rng.random() < 0.4:
            continue
        try:
            alloc = ballots.apply_approval(
                election.method_spec, alloc, pid, True, election
            )
        except VotingError:
            continue
    return alloc


def _pairwise(election: ElectionConfig, rng: random.Random) -> Allocation:
    ids = sorted(election.project_ids())
    pairs = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]
    count = rng.randint(1, len(pairs))
    chosen = rng.sample(pairs, count)
    oriented = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in chosen]
    return ballots.pairwise_allocation(oriented)
