"""Interval realization by positive-weighted graphs.

The upper bounds are closed under min-plus composition; the instance is
feasible exactly when every lower bound sits below the closed value, and the
complete graph weighted by the closure is then a witness.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple, Union

from .core import (
    DissimilarityVector,
    IntervalFamily,
    Pair,
    PreconditionError,
    Variant,
    VariantError,
    Verification,
    WeightedGraph,
    all_pairs,
    check_distances,
    graph_two_weights,
)


@dataclass(frozen=True)
class ClosureResult:
    m_tilde: DissimilarityVector
    # intermediate labels of one optimal chain, empty when the direct bound wins
    via: Dict[Pair, Tuple[int, ...]]


@dataclass(frozen=True)
class GraphFeasible:
    witness: WeightedGraph
    closure: ClosureResult
    feasible = True


@dataclass(frozen=True)
class GraphInfeasible:
    pair: Pair
    chain: Tuple[int, ...]
    slack: Fraction
    closure: ClosureResult
    feasible = False


GraphDecision = Union[GraphFeasible, GraphInfeasible]


def minplus_closure(upper: DissimilarityVector) -> ClosureResult:
    """All-pairs min-plus closure of ``upper`` with one optimal chain per pair.

    Relaxation runs over intermediates in increasing label order and only
    accepts strict improvements, so ties keep the chain found first.
    """
    n = upper.n
    for p, v in upper.items():
        if v <= 0:
            raise PreconditionError(f"closure needs positive entries, pair {p} has {v}")
    dist = {}
    route: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for i, j in all_pairs(n):
        dist[i, j] = dist[j, i] = upper[i, j]
        route[i, j] = route[j, i] = ()
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            if i == k:
                continue
            for j in range(1, n + 1):
                if j == i or j == k:
                    continue
                cand = dist[i, k] + dist[k, j]
                if cand < dist[i, j]:
                    dist[i, j] = cand
                    route[i, j] = route[i, k] + (k,) + route[k, j]
    m_tilde = DissimilarityVector(n, {p: dist[p] for p in all_pairs(n)})
    return ClosureResult(m_tilde, {p: route[p] for p in all_pairs(n)})


def decide_graph(family: IntervalFamily) -> GraphDecision:
    if family.variant is not Variant.GRAPH_CLOSED:
        raise VariantError(f"decide_graph handles graph-closed, got {family.variant.value}")
    upper = DissimilarityVector(family.n, {p: hi for p, (lo, hi) in family.bounds.items()})
    closure = minplus_closure(upper)
    for p in all_pairs(family.n):
        lo = family.bounds[p][0]
        if lo > closure.m_tilde.values[p]:
            return GraphInfeasible(p, closure.via[p], lo - closure.m_tilde.values[p], closure)
    return GraphFeasible(WeightedGraph.complete(closure.m_tilde), closure)


def chain_sum(family_or_upper, i: int, j: int, chain) -> Fraction:
    """Sum of upper bounds along ``i, t_1, ..., t_k, j``."""
    if isinstance(family_or_upper, IntervalFamily):
        def upper(a, b):
            return family_or_upper.hi(a, b)
    else:
        def upper(a, b):
            return family_or_upper[a, b]
    stops = (i, *chain, j)
    return sum((upper(a, b) for a, b in zip(stops, stops[1:])), Fraction(0))


def verify_graph(graph: WeightedGraph, family: IntervalFamily) -> Verification:
    """Recompute the 2-weights exactly and compare them against the intervals."""
    if graph.n != family.n:
        return Verification((), (f"graph labels {graph.n} points, instance has {family.n}",))
    return check_distances(graph_two_weights(graph), family)


def certificate_holds(family: IntervalFamily, decision: GraphInfeasible) -> bool:
    """The cited chain's bound sum lies strictly below the lower bound of its pair."""
    i, j = decision.pair
    if set(decision.chain) & {i, j}:
        return False
    total = chain_sum(family, i, j, decision.chain)
    return family.lo(i, j) - total == decision.slack and decision.slack > 0


__all__ = [
    "ClosureResult",
    "GraphDecision",
    "GraphFeasible",
    "GraphInfeasible",
    "certificate_holds",
    "chain_sum",
    "decide_graph",
    "minplus_closure",
    "verify_graph",
]
