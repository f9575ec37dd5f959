"""Variable elimination with operation counting.

Evidence is applied by slicing every factor before anything is
multiplied.  Deterministic tables are treated like any other table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import ImpossibleEvidenceError, OrderingError
from ..netcore import BeliefNetwork
from .common import CostReport, Distribution, Evidence, check_query, evidence_indices
from .factor import Factor, sum_product


def _sliced_factors(net: BeliefNetwork, ev: Mapping[str, int]) -> list[Factor]:
    return [Factor.from_table(net, n).reduce(ev) for n in net.names]


def _interaction_graph(factors: Iterable[Factor], nodes: Iterable[str]) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in nodes}
    for f in factors:
        scope = [v for v in f.scope if v in adj]
        for a, b in itertools.combinations(scope, 2):
            adj[a].add(b)
            adj[b].add(a)
    return adj


def _fill_count(adj, v):
    nbrs = list(adj[v])
    return sum(1 for a, b in itertools.combinations(nbrs, 2) if b not in adj[a])


def _eliminate_node(adj, v):
    nbrs = adj.pop(v)
    fill = 0
    for a, b in itertools.combinations(nbrs, 2):
        if b not in adj[a]:
            adj[a].add(b)
            adj[b].add(a)
            fill += 1
    for a in nbrs:
        adj[a].discard(v)
    return fill


def _greedy_min_fill(adj: dict[str, set[str]], candidates: Sequence[str], rank: Mapping[str, int]) -> list[str]:
    adj = {v: set(s) for v, s in adj.items()}
    left = sorted(candidates, key=rank.__getitem__)
    order = []
    while left:
        best = min(left, key=lambda v: (_fill_count(adj, v), rank[v]))
        order.append(best)
        left.remove(best)
        _eliminate_node(adj, best)
    return order


def min_fill_ordering(net: BeliefNetwork, query: str, evidence: Evidence | None = None) -> list[str]:
    """Greedy min-fill over the evidence-sliced interaction graph, ties by declaration order."""
    net.require_valid()
    check_query(net, query)
    ev = evidence_indices(net, evidence)
    factors = _sliced_factors(net, ev)
    free = [n for n in net.names if n not in ev]
    adj = _interaction_graph(factors, free)
    return _greedy_min_fill(adj, [n for n in free if n != query], net.rank)


def fill_in_trace(net: BeliefNetwork, evidence: Evidence | None, ordering: Sequence[str]) -> list[int]:
    """Number of fill edges each elimination step of ``ordering`` adds."""
    ev = evidence_indices(net, evidence)
    free = [n for n in net.names if n not in ev]
    adj = _interaction_graph(_sliced_factors(net, ev), free)
    return [_eliminate_node(adj, v) for v in ordering]


@dataclass
class _Tally:
    ops: int = 0
    peak: int = 0

    def see(self, factors):
        for f in factors:
            self.peak = max(self.peak, f.size)


def _run(pool: list[Factor], order: Sequence[str], cards, tally: _Tally) -> list[Factor]:
    pool = list(pool)
    for v in order:
        touched = [f for f in pool if v in f.scope]
        if not touched:
            continue
        pool = [f for f in pool if v not in f.scope]
        new, ops, size = sum_product(touched, v, cards)
        tally.ops += ops
        tally.peak = max(tally.peak, size)
        pool.append(new)
    return pool


def _finish(net, query, ev, pool, cards, tally) -> Distribution:
    var = net.var(query)
    if query in ev:
        z = float(np.prod([float(f.values) for f in pool])) if pool else 1.0
        tally.ops += max(len(pool) - 1, 0)
        probs = np.zeros(var.card)
        probs[ev[query]] = 1.0
    else:
        result, ops, size = sum_product(pool, None, cards)
        tally.ops += ops
        tally.peak = max(tally.peak, size)
        unnorm = np.asarray(result.values, dtype=np.float64).reshape(var.card)
        z = float(unnorm.sum())
        probs = unnorm / z if z > 0 else unnorm
    if not z > 0.0:
        raise ImpossibleEvidenceError()
    return Distribution(query, var.states, probs, z)


def _check_ordering(net, query, ev, ordering):
    expected = {n for n in net.names if n != query and n not in ev}
    ordering = list(ordering)
    if len(ordering) != len(set(ordering)) or set(ordering) != expected:
        raise OrderingError(
            "ordering must be a permutation of the non-query, non-evidence variables"
        )
    return ordering


def eliminate(
    net: BeliefNetwork,
    query: str,
    evidence: Evidence | None = None,
    ordering: Sequence[str] | None = None,
) -> tuple[Distribution, CostReport]:
    net.require_valid()
    check_query(net, query)
    ev = evidence_indices(net, evidence)
    if ordering is None:
        ordering = min_fill_ordering(net, query, evidence)
    else:
        ordering = _check_ordering(net, query, ev, ordering)
    cards = {v.name: v.card for v in net.variables}
    tally = _Tally()
    factors = _sliced_factors(net, ev)
    tally.see(factors)
    pool = _run(factors, ordering, cards, tally)
    dist = _finish(net, query, ev, pool, cards, tally)
    return dist, CostReport(tally.ops, tally.peak, tuple(ordering))


@dataclass(frozen=True)
class CaseSeriesResult:
    results: tuple[Distribution, ...]
    cost: CostReport
    prefix_cost: int
    orderings: Mapping[str, tuple[str, ...]]


def case_series(net: BeliefNetwork, cases: Sequence[tuple[str, Evidence]]) -> CaseSeriesResult:
    """Answer many queries that observe the same variable set, sharing evidence-free work.

    Factors that mention no evidence variable are combined once per query
    variable: every variable appearing only in those factors is summed out
    up front, and the resulting prefix marginal is reused for each case.
    """
    net.require_valid()
    if not cases:
        raise ValueError("case_series needs at least one case")
    ev_vars = set(cases[0][1])
    for query, evidence in cases:
        check_query(net, query)
        if set(evidence) != ev_vars:
            raise ValueError(
                f"inconsistent evidence sets across cases: {sorted(ev_vars)} vs {sorted(evidence)}"
            )
    cards = {v.name: v.card for v in net.variables}
    rank = net.rank
    all_factors = [Factor.from_table(net, n) for n in net.names]
    free_factors = [f for f in all_factors if not ev_vars & set(f.scope)]
    ev_factors = [f for f in all_factors if ev_vars & set(f.scope)]
    in_ev_factors = {v for f in ev_factors for v in f.scope}

    total = _Tally()
    prefix_ops = 0
    prepared: dict[str, tuple[list[Factor], tuple[str, ...]]] = {}
    orderings: dict[str, tuple[str, ...]] = {}
    results = []
    for query, evidence in cases:
        if query not in prepared:
            in_free = {v for f in free_factors for v in f.scope}
            pre_vars = [n for n in net.names if n in in_free and n not in in_ev_factors and n != query]
            pre_adj = _interaction_graph(free_factors, [n for n in net.names if n in in_free])
            pre_order = _greedy_min_fill(pre_adj, pre_vars, rank)
            before = total.ops
            total.see(free_factors)
            prefix = _run(free_factors, pre_order, cards, total)
            prefix_ops += total.ops - before
            prepared[query] = (prefix, tuple(pre_order))
        prefix, pre_order = prepared[query]
        ev = evidence_indices(net, evidence)
        sliced = [f.reduce(ev) for f in ev_factors]
        total.see(sliced)
        pool = prefix + sliced
        if query not in orderings:
            rest = [n for n in net.names if n not in ev and n != query and n not in pre_order]
            adj = _interaction_graph(pool, [n for n in net.names if n not in ev and n not in pre_order])
            orderings[query] = pre_order + tuple(_greedy_min_fill(adj, rest, rank))
        tail = orderings[query][len(pre_order):]
        pool = _run(pool, tail, cards, total)
        results.append(_finish(net, query, ev, pool, cards, total))
    first = orderings[cases[0][0]]
    return CaseSeriesResult(tuple(results), CostReport(total.ops, total.peak, first), prefix_ops, orderings)
