"""Brute-force deciders and seeded instance generators.

The tree oracle never looks at split systems: it puts one unknown on every
edge of every labeled topology and asks Fourier-Motzkin whether the path
sums fit the intervals. The graph oracle enumerates chains explicitly.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .core import (
    DissimilarityVector,
    IntervalFamily,
    Pair,
    RealizationError,
    Variant,
    WeightedGraph,
    WeightedTree,
    all_pairs,
    as_rational,
    tree_two_weights,
    graph_two_weights,
)
from .linsys import LinExpr, fm_feasible, ge, gt
from .splits import random_topology, topologies

MAX_ORACLE_N = 6


class OracleSizeError(RealizationError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    witness: Optional[Union[WeightedTree, WeightedGraph]] = None
    pair: Optional[Pair] = None
    chain: Tuple[int, ...] = ()


def _check_size(n: int) -> None:
    if n > MAX_ORACLE_N:
        raise OracleSizeError(f"oracle enumerates exhaustively and stops at n = {MAX_ORACLE_N}, got n = {n}")


def brute_force_tree_decide(family: IntervalFamily) -> OracleResult:
    """Edge-variable feasibility over every topology (only the star for star-open)."""
    n = family.n
    _check_size(n)
    rel = gt if family.variant.is_open else ge
    candidates = topologies(n)
    if family.variant is Variant.STAR_OPEN:
        candidates = [t for t in candidates if t.internal_edge_count() == 0]
    for topo in candidates:
        edge_var = {frozenset((u, v)): k for k, (u, v, _) in enumerate(topo.edges)}
        rows = []
        for i, j in all_pairs(n):
            path = topo.path_edges(topo.leaves[i - 1], topo.leaves[j - 1])
            length = LinExpr({edge_var[frozenset(e)]: 1 for e in path})
            lo, hi = family.bounds[i, j]
            rows.append(rel(length - lo))
            rows.append(rel(hi - length))
        if family.variant.positive:
            rows.extend(gt(LinExpr.var(k)) for k in range(len(topo.edges)))
        result = fm_feasible(rows, range(len(topo.edges)))
        if result.feasible:
            weights = {frozenset((u, v)): result.assignment[k] for k, (u, v, _) in enumerate(topo.edges)}
            return OracleResult(True, topo.reweighted(lambda u, v, w: weights[frozenset((u, v))]))
    return OracleResult(False)


def _chains(others):
    for k in range(len(others) + 1):
        yield from itertools.permutations(others, k)


def brute_force_graph_decide(family: IntervalFamily) -> OracleResult:
    """Check ``lo_ij <= hi`` summed along every chain of distinct intermediates."""
    n = family.n
    _check_size(n)
    best = {}
    for i, j in all_pairs(n):
        others = [t for t in range(1, n + 1) if t not in (i, j)]
        lo = family.bounds[i, j][0]
        low = None
        for chain in _chains(others):
            stops = (i, *chain, j)
            total = sum((family.hi(a, b) for a, b in zip(stops, stops[1:])), Fraction(0))
            if lo > total:
                return OracleResult(False, pair=(i, j), chain=tuple(chain))
            if low is None or total < low:
                low = total
        best[i, j] = low
    return OracleResult(True, WeightedGraph.complete(DissimilarityVector(n, best)))


@dataclass(frozen=True)
class InstanceSpec:
    """Everything needed to regenerate an instance; ``jitter`` shifts interval
    centres away from the ground truth so that some instances are infeasible."""

    n: int
    variant: Variant
    seed: int
    weight_range: Tuple[Fraction, Fraction] = (Fraction(-3), Fraction(5))
    half_width: Fraction = Fraction(1, 4)
    jitter: Fraction = Fraction(0)
    max_denominator: int = 16
    # round bounds outward to multiples of 1/bound_denominator (None keeps them exact)
    bound_denominator: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        lo, hi = (as_rational(v) for v in self.weight_range)
        object.__setattr__(self, "weight_range", (lo, hi))
        object.__setattr__(self, "half_width", as_rational(self.half_width))
        object.__setattr__(self, "jitter", as_rational(self.jitter))
        if lo >= hi:
            raise ValueError("empty weight range")


def random_fraction(rng: random.Random, lo: Fraction, hi: Fraction, max_denominator: int = 16,
                    exclude_zero: bool = False, open_low: bool = False) -> Fraction:
    """Uniform over fractions ``p/q`` in ``[lo, hi]`` with ``q <= max_denominator``."""
    while True:
        q = rng.randint(1, max_denominator)
        p_lo = -((-lo.numerator * q) // lo.denominator)  # ceil(lo * q)
        p_hi = (hi.numerator * q) // hi.denominator
        if p_lo > p_hi:
            continue
        v = Fraction(rng.randint(p_lo, p_hi), q)
        if exclude_zero and v == 0:
            continue
        if open_low and v == lo:
            continue
        return v


def random_tree(n: int, rng: random.Random, weight_range=(Fraction(-3), Fraction(5)),
                positive: bool = False, max_denominator: int = 16,
                multifurcation: float = 0.2) -> WeightedTree:
    lo, hi = (as_rational(v) for v in weight_range)
    if positive:
        lo = max(lo, Fraction(0))
    edges = random_topology(n, rng, multifurcation)
    named = [
        (u, v, random_fraction(rng, lo, hi, max_denominator, exclude_zero=True, open_low=positive))
        for u, v in edges
    ]
    return WeightedTree.from_edges(named, {k: ("L", k) for k in range(1, n + 1)})


def random_graph(n: int, rng: random.Random, weight_range=(Fraction(1, 16), Fraction(5)),
                 max_denominator: int = 16, extra_vertices: int = 2) -> WeightedGraph:
    """Connected positive graph: random spanning tree plus random chords."""
    lo, hi = (as_rational(v) for v in weight_range)
    lo = max(lo, Fraction(1, max_denominator))
    V = n + rng.randint(0, extra_vertices)
    order = list(range(V))
    rng.shuffle(order)
    edges = {}
    for k in range(1, V):
        u, v = order[k], order[rng.randrange(k)]
        edges[frozenset((u, v))] = random_fraction(rng, lo, hi, max_denominator)
    for u, v in itertools.combinations(range(V), 2):
        if frozenset((u, v)) not in edges and rng.random() < 0.3:
            edges[frozenset((u, v))] = random_fraction(rng, lo, hi, max_denominator)
    return WeightedGraph(V, tuple((min(e), max(e), w) for e, w in edges.items()), tuple(range(n)))


def random_instance(spec: InstanceSpec):
    """Interval family around the 2-weights of a random ground truth.

    Positive variants keep every lower bound above zero by falling back to
    half the true distance. A zero half-width is only valid for closed
    variants.
    """
    rng = random.Random(spec.seed)
    variant = spec.variant
    if variant is Variant.GRAPH_CLOSED:
        truth = random_graph(spec.n, rng, spec.weight_range, spec.max_denominator)
        dist = graph_two_weights(truth)
    else:
        truth = random_tree(
            spec.n, rng, spec.weight_range, positive=variant.positive,
            max_denominator=spec.max_denominator,
            multifurcation=1.0 if variant is Variant.STAR_OPEN else 0.2,
        )
        dist = tree_two_weights(truth)
    bounds = {}
    for p, v in dist.items():
        centre = v
        if spec.jitter:
            centre = v + random_fraction(rng, -spec.jitter, spec.jitter, spec.max_denominator)
        lo, hi = centre - spec.half_width, centre + spec.half_width
        if variant.positive and lo <= 0:
            lo = v / 2
        if variant.positive and hi < lo:
            hi = lo + spec.half_width
        if spec.bound_denominator:
            lo, hi = _round_outward(lo, hi, spec.bound_denominator, variant.positive)
        bounds[p] = (lo, hi)
    return IntervalFamily(spec.n, bounds, variant), truth


def _round_outward(lo: Fraction, hi: Fraction, q: int, positive: bool) -> Tuple[Fraction, Fraction]:
    new_lo = Fraction(math.floor(lo * q), q)
    new_hi = Fraction(math.ceil(hi * q), q)
    if positive and new_lo <= 0:
        new_lo = Fraction(1, q)
    if new_hi <= new_lo:
        new_hi = new_lo + Fraction(1, q)
    return new_lo, new_hi


def random_box_family(n: int, variant, rng: random.Random, scale=Fraction(8), max_denominator: int = 16) -> IntervalFamily:
    """Unstructured intervals: independent random bounds per pair."""
    variant = Variant(variant)
    low = Fraction(1, max_denominator) if variant.positive else -scale / 2
    bounds = {}
    for p in all_pairs(n):
        while True:
            a = random_fraction(rng, low, scale, max_denominator)
            b = random_fraction(rng, low, scale, max_denominator)
            if a != b or not variant.is_open:
                break
        bounds[p] = (min(a, b), max(a, b))
    return IntervalFamily(n, bounds, variant)


def mixed_instance(n: int, variant, seed: int) -> IntervalFamily:
    """The seeded instance mix used by cross-checks.

    Every third seed draws unstructured random intervals; the rest perturb a
    random ground truth (half-width 1/4, 1/2 or 1, centre jitter up to 1),
    which gives a blend of feasible and infeasible families. Perturbed bounds
    are rounded outward to sixteenths; box bounds have denominators at most 16.
    """
    variant = Variant(variant)
    rng = random.Random(seed)
    if seed % 3 == 2:
        return random_box_family(n, variant, rng)
    half = Fraction(rng.choice([1, 2, 4]), 4)
    spec = InstanceSpec(n, variant, seed, half_width=half, jitter=Fraction(1), bound_denominator=16)
    family, _ = random_instance(spec)
    return family


__all__ = [
    "InstanceSpec",
    "MAX_ORACLE_N",
    "OracleResult",
    "OracleSizeError",
    "brute_force_graph_decide",
    "brute_force_tree_decide",
    "mixed_instance",
    "random_box_family",
    "random_fraction",
    "random_graph",
    "random_instance",
    "random_tree",
]
