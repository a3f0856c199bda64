"""Interval realization by weighted trees with leaves exactly ``[n]``.

For each candidate quartet split system the split equalities are solved,
the interval bounds (plus triangle and quartet inequalities in the positive
variant) are rewritten over the free unknowns, and the resulting system is
decided by Fourier-Motzkin elimination. A sample point is lifted back to a
full dissimilarity vector and turned into a tree by leaf insertion.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, partial
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .core import (
    ConstructionError,
    DissimilarityVector,
    IntervalFamily,
    PreconditionError,
    Variant,
    VariantError,
    Verification,
    WeightedTree,
    all_pairs,
    check_distances,
    fmt,
    pair,
    quartets,
    tree_two_weights,
)
from .linsys import (
    EQ,
    Certificate,
    Constraint,
    LinExpr,
    Parametrization,
    fm_feasible,
    ge,
    gt,
    solve_equalities,
    split_equalities,
)
from .splits import (
    QuartetSplit,
    SplitSystem,
    check_admissible,
    enumerate_candidate_systems,
    quartet_splits,
    star_system,
)


@dataclass(frozen=True)
class TreeFeasible:
    witness: WeightedTree
    distances: DissimilarityVector
    system: SplitSystem
    candidate: int
    feasible = True


@dataclass(frozen=True)
class Rejection:
    """One candidate split system shown infeasible.

    ``constraints`` are the rows the certificate indexes into; they are
    rebuilt on first access because most rejections never need them.
    """

    candidate: int
    system: SplitSystem
    certificate: Certificate
    rows: Callable[[], Sequence[Constraint]] = field(repr=False, compare=False)

    @cached_property
    def constraints(self) -> Tuple[Constraint, ...]:
        return tuple(self.rows())


@dataclass(frozen=True)
class TreeInfeasible:
    rejections: Tuple[Rejection, ...]
    feasible = False

    @property
    def certificates(self) -> Dict[int, Certificate]:
        return {r.candidate: r.certificate for r in self.rejections}


TreeDecision = Union[TreeFeasible, TreeInfeasible]


def _parametrize(system: SplitSystem) -> Parametrization:
    return solve_equalities(split_equalities(system), all_pairs(system.n))


def _row_specs(system: SplitSystem, family: IntervalFamily, within=None):
    """``(label, kind, data)`` for every row of the candidate system, in order.

    With ``within`` only rows whose pairs all lie inside that label set are
    produced; labels are the same either way.
    """
    n = family.n
    inside = set(within) if within is not None else set(range(1, n + 1))
    pairs = [p for p in all_pairs(n) if inside.issuperset(p)]
    for i, j in pairs:
        yield f"lo{{{i},{j}}}", "lo", (i, j)
        yield f"hi{{{i},{j}}}", "hi", (i, j)
    if family.variant is Variant.TREE_POSITIVE_OPEN:
        for a, b in pairs:
            for c in sorted(inside):
                if c not in (a, b):
                    yield f"triangle({a},{b};{c})", "triangle", (a, b, c)
        for q in quartets(n):
            if not inside.issuperset(q):
                continue
            s = system.single_split(q)
            if s is not None:
                yield f"quartet{s}", "quartet", s
        for i, j in pairs:
            yield f"positive{{{i},{j}}}", "positive", (i, j)


def _rows(system: SplitSystem, family: IntervalFamily, d, within=None) -> List[Constraint]:
    rel = gt if family.variant.is_open else ge
    rows = []
    for label, kind, data in _row_specs(system, family, within):
        if kind == "lo":
            rows.append(rel(d(*data) - family.lo(*data), label))
        elif kind == "hi":
            rows.append(rel(family.hi(*data) - d(*data), label))
        elif kind == "triangle":
            a, b, c = data
            rows.append(gt(d(a, c) + d(c, b) - d(a, b), label))
        elif kind == "quartet":
            (a, b), (c, e) = data.left, data.right
            rows.append(gt(d(a, c) + d(b, e) - d(a, b) - d(c, e), label))
        else:
            rows.append(gt(d(*data), label))
    return rows


def _distance_unknown(i, j) -> LinExpr:
    return LinExpr.var(pair(i, j))


def _check_inputs(system: SplitSystem, family: IntervalFamily) -> None:
    if not family.variant.is_tree:
        raise VariantError(f"build_system needs a tree variant, got {family.variant.value}")
    if system.n != family.n:
        raise PreconditionError(f"split system on {system.n} labels, instance on {family.n}")
    failure = check_admissible(system)
    if failure:
        raise PreconditionError(f"split system fails {failure[0]}: {failure[1]}")


def build_system(
    system: SplitSystem,
    family: IntervalFamily,
    parametrization: Optional[Parametrization] = None,
) -> List[Constraint]:
    """Constraints over the free unknowns of the split-equality solution space.

    Rows come in a fixed order: lower then upper bound for each pair, then
    (positive variant only) triangle rows, one row per single-split quartet,
    and positivity rows.
    """
    _check_inputs(system, family)
    param = parametrization or _parametrize(system)
    return _rows(system, family, lambda i, j: param.expr(pair(i, j)))


class _LocalScreen:
    """Refutes candidates from the sub-instance on a few labels.

    Restricted to a label subset ``L``, a candidate contributes the rows
    that only mention pairs inside ``L`` plus its split equalities inside
    ``L``. Many candidates share the same restriction, so each restricted
    system is decided once. An infeasible restriction refutes the
    candidate: its split equalities vanish identically once the candidate's
    parametrization is substituted, so the remaining multipliers form a
    certificate over the candidate's own rows.
    """

    def __init__(self, family: IntervalFamily, sizes=(4, 5)):
        self.family = family
        n = family.n
        self.subsets = [L for k in sizes if k < n for L in itertools.combinations(range(1, n + 1), k)]
        self.cache: Dict[Tuple, Optional[Tuple[Tuple[str, Fraction], ...]]] = {}

    def refute(self, system: SplitSystem) -> Optional[Certificate]:
        for L in self.subsets:
            inside = set(L)
            members = frozenset(s for s in system.members if inside.issuperset(s.quartet))
            key = (L, members)
            if key not in self.cache:
                self.cache[key] = self._decide(L, members)
            local = self.cache[key]
            if local is not None:
                return self._lift(system, local)
        return None

    def _decide(self, L, members):
        restricted = SplitSystem(self.family.n, members)
        keep = _rows(restricted, self.family, _distance_unknown, within=L)
        keep += split_equalities(restricted)
        result = fm_feasible(keep)
        if result.feasible:
            return None
        used = [(keep[i].label, m) for i, m in result.certificate.multipliers if keep[i].sense != EQ]
        # substitution leaves row constants alone, so the residual carries over
        residual = sum((m * keep[i].expr.const for i, m in result.certificate.multipliers
                        if keep[i].sense != EQ), Fraction(0))
        return tuple(used), residual

    def _lift(self, system: SplitSystem, local) -> Certificate:
        used, residual = local
        index = {label: k for k, (label, _, _) in enumerate(_row_specs(system, self.family))}
        return Certificate(tuple(sorted((index[label], m) for label, m in used)), residual)


def decide_tree(family: IntervalFamily, strategy: str = "topology") -> TreeDecision:
    """Search candidate split systems for a feasible linear system.

    The first candidate (in enumeration order) with a sample point yields
    the witness; otherwise every candidate carries a certificate.
    """
    if not family.variant.is_tree:
        raise VariantError(f"decide_tree needs a tree variant, got {family.variant.value}")
    n = family.n
    if n < 4:
        candidates = [SplitSystem(n, frozenset())]
    else:
        candidates = enumerate_candidate_systems(n, strategy)
    rejections = []
    screen = _LocalScreen(family)
    for idx, system in enumerate(candidates):
        cert = screen.refute(system)
        if cert is not None:
            rejections.append(Rejection(idx, system, cert, partial(build_system, system, family)))
            continue
        param = _parametrize(system)
        rows = build_system(system, family, param)
        result = fm_feasible(rows, param.free)
        if result.feasible:
            values = param.lift(result.assignment)
            dist = DissimilarityVector(n, {p: values[p] for p in all_pairs(n)})
            witness = construct_tree_from_D(dist, positive=family.variant.positive)
            report = verify_tree(witness, family)
            if not report:
                raise RuntimeError(f"witness for candidate {idx} failed verification: {report.failures()}")
            return TreeFeasible(witness, dist, system, idx)
        rejections.append(Rejection(idx, system, result.certificate, lambda rows=tuple(rows): rows))
    return TreeInfeasible(tuple(rejections))


def four_point_resolution(dist: DissimilarityVector) -> Dict[Tuple[int, ...], Optional[QuartetSplit]]:
    """Per quartet: the split whose pair-sum is the odd one out, or ``None`` when all three agree."""
    out = {}
    for q in quartets(dist.n):
        a, b, c, d = q
        s1 = dist[a, b] + dist[c, d]
        s2 = dist[a, c] + dist[b, d]
        s3 = dist[a, d] + dist[b, c]
        ab_cd, ac_bd, ad_bc = quartet_splits(q)
        if s1 == s2 == s3:
            out[q] = None
        elif s2 == s3:
            out[q] = ab_cd
        elif s1 == s3:
            out[q] = ac_bd
        elif s1 == s2:
            out[q] = ad_bc
        else:
            raise PreconditionError(
                f"four-point condition fails on quartet {q}: pair sums {fmt(s1)}, {fmt(s2)}, {fmt(s3)} all differ"
            )
    return out


def _check_positive_metric(dist: DissimilarityVector) -> None:
    n = dist.n
    for a, b in all_pairs(n):
        for c in range(1, n + 1):
            if c not in (a, b) and dist[a, b] > dist[a, c] + dist[c, b]:
                raise PreconditionError(f"triangle inequality fails: D{a}{b} > D{a}{c} + D{c}{b}")
    for q in quartets(n):
        a, b, c, d = q
        sums = sorted([dist[a, b] + dist[c, d], dist[a, c] + dist[b, d], dist[a, d] + dist[b, c]])
        if sums[1] != sums[2]:
            raise PreconditionError(f"maximum pair sum on quartet {q} is attained only once")


def construct_tree_from_D(
    dist: DissimilarityVector,
    positive: bool = False,
    order: Optional[Sequence[int]] = None,
) -> WeightedTree:
    """Tree with exactly the given 2-weights, built by inserting one leaf at a time.

    Each new leaf ``k`` goes where its distances to the placed leaves put it:
    at a vertex, on an edge, or on a fresh path of weights ``a, -a`` that
    splits a vertex's branches into two groups. Signed weights can add up
    to zero along a path, which hides it among the earlier leaves; the split
    case brings it back. Every placement is checked exactly against ``D``,
    and zero-weight internal edges are contracted after each step, so the
    partial tree stays the unique realization up to such edges.
    ``order`` fixes the insertion order (default ``1..n``).
    """
    n = dist.n
    four_point_resolution(dist)
    if positive:
        _check_positive_metric(dist)
    order = list(order) if order is not None else list(range(1, n + 1))
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError("insertion order must be a permutation of 1..n")

    first, second = order[0], order[1]
    adj: Dict[int, Dict[int, Fraction]] = {first: {second: dist[first, second]}, second: {first: dist[first, second]}}
    fresh = itertools.count(-1, -1)

    def depths(graph, src) -> Dict[int, Fraction]:
        out = {src: Fraction(0)}
        stack = [src]
        while stack:
            y = stack.pop()
            for z, w in graph[y].items():
                if z not in out:
                    out[z] = out[y] + w
                    stack.append(z)
        return out

    def side(u, v) -> int:
        """Smallest leaf label reachable from u without crossing edge u-v."""
        seen, stack, best = {u, v}, [u], None
        while stack:
            y = stack.pop()
            if y > 0 and (best is None or y < best):
                best = y
            for z in adj[y]:
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        return best

    def link(graph, u, v, w):
        graph.setdefault(u, {})[v] = w
        graph.setdefault(v, {})[u] = w

    def unlink(graph, u, v):
        del graph[u][v], graph[v][u]

    def candidates(k):
        """Trial trees with k added: at or inside a vertex first, then on each edge."""
        for w_vertex in sorted(y for y in adj if y < 0):
            from_w = depths(adj, w_vertex)
            offset = {y: dist[side(y, w_vertex), k] - from_w[side(y, w_vertex)] for y in adj[w_vertex]}
            values = sorted(set(offset.values()))
            if len(values) == 1:
                trial = {y: dict(e) for y, e in adj.items()}
                link(trial, w_vertex, k, values[0])
                yield trial
            elif len(values) == 2:
                low = [y for y in adj[w_vertex] if offset[y] == values[0]]
                high = [y for y in adj[w_vertex] if offset[y] == values[1]]
                if len(low) < 2 or len(high) < 2:
                    continue
                a = (values[1] - values[0]) / 2
                trial = {y: dict(e) for y, e in adj.items()}
                mid, other = next(fresh), next(fresh)
                for y in low:
                    w = trial[w_vertex][y]
                    unlink(trial, w_vertex, y)
                    link(trial, other, y, w)
                # low branches move to a new vertex; w -a- mid -(-a)- other keeps their old distances
                link(trial, w_vertex, mid, a)
                link(trial, mid, other, -a)
                link(trial, mid, k, values[0] + a)
                yield trial
        for u, v in sorted((u, v) for u in adj for v in adj[u] if u < v):
            i, j = side(u, v), side(v, u)
            weight = adj[u][v]
            cu = dist[i, k] - depths(adj, u)[i]
            cv = dist[j, k] - depths(adj, v)[j]
            pendant = (cu + cv - weight) / 2
            near = cu - pendant
            trial = {y: dict(e) for y, e in adj.items()}
            mid = next(fresh)
            unlink(trial, u, v)
            link(trial, u, mid, near)
            link(trial, mid, v, weight - near)
            link(trial, mid, k, pendant)
            yield trial

    def contract_zero_edges(graph):
        while True:
            zero = next(((u, v) for u in graph for v, w in graph[u].items() if u < 0 and v < 0 and w == 0), None)
            if zero is None:
                return
            keep, drop = zero
            unlink(graph, keep, drop)
            for y, w in list(graph[drop].items()):
                unlink(graph, drop, y)
                link(graph, keep, y, w)
            del graph[drop]

    placed = [first, second]
    for k in order[2:]:
        for trial in candidates(k):
            from_k = depths(trial, k)
            if all(from_k[i] == dist[i, k] for i in placed):
                adj = trial
                break
        else:
            raise PreconditionError(f"no position for leaf {k} reproduces its distances to {placed}")
        contract_zero_edges(adj)
        placed.append(k)

    named_edges = [(u, v, w) for u in adj for v, w in adj[u].items() if u < v]
    tree = WeightedTree.from_edges(named_edges, {k: k for k in range(1, n + 1)})
    if tree_two_weights(tree) != dist:
        raise PreconditionError("dissimilarity vector is not realized by the reconstructed tree")
    if positive:
        for u, v, w in tree.edges:
            if w <= 0:
                raise ConstructionError(f"edge ({u}, {v}) has nonpositive weight {fmt(w)}")
    return tree


def decide_star(family: IntervalFamily) -> TreeDecision:
    """Feasibility of ``lo_ij < y_i + y_j < hi_ij`` over pendant lengths of a star."""
    if family.variant is not Variant.STAR_OPEN:
        raise VariantError(f"decide_star handles star-open, got {family.variant.value}")
    n = family.n

    def y(i):
        return LinExpr.var(("y", i))

    rows = []
    for i, j in all_pairs(n):
        lo, hi = family.bounds[i, j]
        rows.append(gt(y(i) + y(j) - lo, f"lo{{{i},{j}}}"))
        rows.append(gt(hi - y(i) - y(j), f"hi{{{i},{j}}}"))
    system = star_system(n) if n >= 4 else SplitSystem(n, frozenset())
    result = fm_feasible(rows, [("y", i) for i in range(1, n + 1)])
    if not result.feasible:
        return TreeInfeasible((Rejection(0, system, result.certificate, lambda rows=tuple(rows): rows),))
    pendant = result.assignment
    if n == 2:
        edges = [(1, 2, pendant["y", 1] + pendant["y", 2])]
    else:
        edges = [("center", i, pendant["y", i]) for i in range(1, n + 1)]
    witness = WeightedTree.from_edges(edges, {i: i for i in range(1, n + 1)})
    return TreeFeasible(witness, tree_two_weights(witness), system, 0)


def verify_tree(tree: WeightedTree, family: IntervalFamily) -> Verification:
    """Exact check of every 2-weight against the intervals (open or closed per
    variant); the positive variant also requires positive edge weights."""
    issues = []
    if family.variant.positive:
        issues = [
            f"edge ({u}, {v}) has nonpositive weight {fmt(w)}" for u, v, w in tree.edges if w <= 0
        ]
    if tree.n != family.n:
        return Verification((), (f"tree has {tree.n} leaves, instance has {family.n}",))
    return check_distances(tree_two_weights(tree), family, issues)


__all__ = [
    "Rejection",
    "TreeDecision",
    "TreeFeasible",
    "TreeInfeasible",
    "build_system",
    "construct_tree_from_D",
    "decide_star",
    "decide_tree",
    "four_point_resolution",
    "verify_tree",
]
