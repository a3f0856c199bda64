"""Exact arithmetic helpers and the graph/tree/distance data model.

Every quantity is a :class:`fractions.Fraction`. Leaf labels run over
``1..n``; a 2-subset ``{i, j}`` is stored as the sorted tuple ``(i, j)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, Hashable, Iterable, Iterator, Mapping, Sequence, Tuple

Rational = Fraction
Pair = Tuple[int, int]


class RealizationError(ValueError):
    """Base class for every error raised by this package."""


class StructureError(RealizationError):
    """A graph or tree violates one of its structural invariants."""


class VariantError(RealizationError):
    """An operation was called on an instance of the wrong variant."""


class PreconditionError(RealizationError):
    """An input fails a mathematical precondition (e.g. four-point condition)."""


class ConstructionError(RealizationError):
    """A witness could not be built with the requested weight sign."""


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE_ "):
            raise ValueError(f"not a rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def fmt(q: Fraction) -> str:
    """Canonical string form: ``"p"`` for integers, ``"p/q"`` otherwise."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def pair(i: int, j: int) -> Pair:
    if i == j:
        raise ValueError(f"a pair needs two distinct labels, got {i} twice")
    return (i, j) if i < j else (j, i)


def all_pairs(n: int) -> list[Pair]:
    return list(itertools.combinations(range(1, n + 1), 2))


class Variant(str, Enum):
    GRAPH_CLOSED = "graph-closed"
    TREE_GENERAL_OPEN = "tree-general-open"
    TREE_GENERAL_CLOSED = "tree-general-closed"
    TREE_POSITIVE_OPEN = "tree-positive-open"
    STAR_OPEN = "star-open"

    @property
    def is_open(self) -> bool:
        return self in (Variant.TREE_GENERAL_OPEN, Variant.TREE_POSITIVE_OPEN, Variant.STAR_OPEN)

    @property
    def positive(self) -> bool:
        return self in (Variant.GRAPH_CLOSED, Variant.TREE_POSITIVE_OPEN)

    @property
    def is_tree(self) -> bool:
        return self in (
            Variant.TREE_GENERAL_OPEN,
            Variant.TREE_GENERAL_CLOSED,
            Variant.TREE_POSITIVE_OPEN,
        )


@dataclass(frozen=True, eq=False)
class DissimilarityVector:
    """A value for every 2-subset of ``[n]``."""

    n: int
    values: Mapping[Pair, Fraction]

    def __post_init__(self):
        expected = set(all_pairs(self.n))
        if set(self.values) != expected:
            missing = sorted(expected - set(self.values))
            extra = sorted(set(self.values) - expected)
            raise StructureError(f"dissimilarity vector not total: missing {missing}, extra {extra}")

    @classmethod
    def from_mapping(cls, n: int, values: Mapping) -> "DissimilarityVector":
        return cls(n, {pair(*k): as_rational(v) for k, v in values.items()})

    def __getitem__(self, key) -> Fraction:
        return self.values[pair(*key)]

    def items(self):
        return sorted(self.values.items())

    def __eq__(self, other):
        if not isinstance(other, DissimilarityVector):
            return NotImplemented
        return self.n == other.n and dict(self.values) == dict(other.values)

    def __repr__(self):
        body = ", ".join(f"{i}{j}:{fmt(v)}" for (i, j), v in self.items())
        return f"D({body})"


@dataclass(frozen=True, eq=False)
class IntervalFamily:
    """Lower/upper bounds for every pairwise distance, plus the variant."""

    n: int
    bounds: Mapping[Pair, Tuple[Fraction, Fraction]]
    variant: Variant

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.n < 2:
            raise PreconditionError("need at least two labeled points")
        expected = set(all_pairs(self.n))
        if set(self.bounds) != expected:
            missing = sorted(expected - set(self.bounds))
            raise PreconditionError(f"interval family not total, missing pairs {missing}")
        for p, (lo, hi) in self.bounds.items():
            if lo > hi:
                raise PreconditionError(f"pair {p}: lower bound {fmt(lo)} exceeds upper bound {fmt(hi)}")
            if self.variant.is_open and lo == hi:
                raise PreconditionError(f"pair {p}: open interval ({fmt(lo)}, {fmt(hi)}) is empty")
            if self.variant.positive and (lo <= 0 or hi <= 0):
                raise PreconditionError(f"pair {p}: {self.variant.value} needs positive bounds")

    @classmethod
    def build(cls, n: int, bounds: Mapping, variant) -> "IntervalFamily":
        clean = {pair(*k): (as_rational(lo), as_rational(hi)) for k, (lo, hi) in bounds.items()}
        return cls(n, clean, Variant(variant))

    @classmethod
    def around(cls, d: DissimilarityVector, half_width, variant) -> "IntervalFamily":
        h = as_rational(half_width)
        return cls(d.n, {p: (v - h, v + h) for p, v in d.values.items()}, Variant(variant))

    def __eq__(self, other):
        if not isinstance(other, IntervalFamily):
            return NotImplemented
        return (self.n, self.variant, dict(self.bounds)) == (other.n, other.variant, dict(other.bounds))

    def __hash__(self):
        return hash((self.n, self.variant, frozenset(self.bounds.items())))

    def lo(self, i: int, j: int) -> Fraction:
        return self.bounds[pair(i, j)][0]

    def hi(self, i: int, j: int) -> Fraction:
        return self.bounds[pair(i, j)][1]

    def admits(self, p: Pair, value: Fraction) -> bool:
        lo, hi = self.bounds[p]
        if self.variant.is_open:
            return lo < value < hi
        return lo <= value <= hi

    def with_variant(self, variant) -> "IntervalFamily":
        return IntervalFamily(self.n, dict(self.bounds), Variant(variant))


def _edge_key(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _adjacency(vertex_count: int, edges) -> Dict[int, Dict[int, Fraction]]:
    adj: Dict[int, Dict[int, Fraction]] = {v: {} for v in range(vertex_count)}
    for u, v, w in edges:
        adj[u][v] = w
        adj[v][u] = w
    return adj


def _check_simple_connected(vertex_count: int, edges) -> None:
    seen = set()
    for u, v, _ in edges:
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise StructureError(f"edge ({u}, {v}) references a vertex outside 0..{vertex_count - 1}")
        if u == v:
            raise StructureError(f"loop at vertex {u}")
        key = _edge_key(u, v)
        if key in seen:
            raise StructureError(f"parallel edge {key}")
        seen.add(key)
    if vertex_count == 0:
        raise StructureError("empty graph")
    adj = _adjacency(vertex_count, edges)
    stack, reached = [0], {0}
    while stack:
        for x in adj[stack.pop()]:
            if x not in reached:
                reached.add(x)
                stack.append(x)
    if len(reached) != vertex_count:
        raise StructureError(f"disconnected: {vertex_count - len(reached)} unreachable vertices")


@dataclass(frozen=True)
class WeightedGraph:
    """Simple connected graph; ``labels[k-1]`` is the vertex carrying label ``k``."""

    vertex_count: int
    edges: Tuple[Tuple[int, int, Fraction], ...]
    labels: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((u, v, as_rational(w)) for u, v, w in self.edges))
        object.__setattr__(self, "labels", tuple(self.labels))
        _check_simple_connected(self.vertex_count, self.edges)
        if len(set(self.labels)) != len(self.labels):
            raise StructureError("two labels share a vertex")
        if any(not 0 <= v < self.vertex_count for v in self.labels):
            raise StructureError("label attached to a nonexistent vertex")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def complete(cls, weights: DissimilarityVector) -> "WeightedGraph":
        edges = tuple((i - 1, j - 1, w) for (i, j), w in weights.items())
        return cls(weights.n, edges, tuple(range(weights.n)))


@dataclass(frozen=True)
class WeightedTree:
    """Tree whose leaves are exactly the labeled vertices.

    Canonical numbering: label ``k`` sits on vertex ``k - 1`` and internal
    vertices follow. Use :meth:`from_edges` to build from arbitrary vertex
    names; it suppresses degree-2 vertices and renumbers.
    """

    vertex_count: int
    edges: Tuple[Tuple[int, int, Fraction], ...]
    leaves: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((u, v, as_rational(w)) for u, v, w in self.edges))
        object.__setattr__(self, "leaves", tuple(self.leaves))
        n = len(self.leaves)
        if n < 2:
            raise StructureError("a tree needs at least two labeled leaves")
        if len(self.edges) != self.vertex_count - 1:
            raise StructureError(
                f"not a tree: {len(self.edges)} edges on {self.vertex_count} vertices"
            )
        _check_simple_connected(self.vertex_count, self.edges)
        if len(set(self.leaves)) != n:
            raise StructureError("two labels share a vertex")
        degree = [0] * self.vertex_count
        for u, v, _ in self.edges:
            degree[u] += 1
            degree[v] += 1
        labeled = set(self.leaves)
        for v in range(self.vertex_count):
            if v in labeled and degree[v] != 1:
                raise StructureError(f"labeled vertex {v} has degree {degree[v]}, expected a leaf")
            if v not in labeled and degree[v] == 1:
                raise StructureError(f"unlabeled leaf at vertex {v}")
            if v not in labeled and degree[v] == 2:
                raise StructureError(f"internal vertex {v} has degree 2")

    @property
    def n(self) -> int:
        return len(self.leaves)

    @cached_property
    def adjacency(self) -> Dict[int, Dict[int, Fraction]]:
        return _adjacency(self.vertex_count, self.edges)

    @cached_property
    def label_of(self) -> Dict[int, int]:
        return {v: k + 1 for k, v in enumerate(self.leaves)}

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Tuple[Hashable, Hashable, object]],
        leaves: Mapping[int, Hashable],
    ) -> "WeightedTree":
        """Build from named vertices; ``leaves`` maps label -> vertex name."""
        adj: Dict[Hashable, Dict[Hashable, Fraction]] = {}
        for u, v, w in edges:
            if u == v:
                raise StructureError(f"loop at {u!r}")
            if v in adj.get(u, {}):
                raise StructureError(f"parallel edge {u!r}-{v!r}")
            w = as_rational(w)
            adj.setdefault(u, {})[v] = w
            adj.setdefault(v, {})[u] = w
        labeled = set(leaves.values())
        if len(labeled) != len(leaves):
            raise StructureError("two labels share a vertex")
        for x in list(adj):
            if x in labeled or len(adj[x]) != 2:
                continue
            (a, wa), (b, wb) = adj[x].items()
            if b in adj[a]:
                raise StructureError("suppressing a degree-2 vertex would close a cycle")
            del adj[a][x], adj[b][x], adj[x]
            adj[a][b] = adj[b][a] = wa + wb
        n = len(leaves)
        order = [leaves[k] for k in range(1, n + 1)]
        index = {name: k for k, name in enumerate(order)}
        for name in adj:
            if name not in index:
                index[name] = len(index)
        if set(index) != set(adj) | set(order):
            raise StructureError("labels refer to vertices absent from the edge list")
        out = []
        for u in adj:
            for v, w in adj[u].items():
                a, b = index[u], index[v]
                if a < b:
                    out.append((a, b, w))
        out.sort()
        return cls(len(index), tuple(out), tuple(range(n)))

    def path_edges(self, a: int, b: int) -> list[Tuple[int, int]]:
        """Vertex pairs along the unique path between vertices ``a`` and ``b``."""
        parent = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            if x == b:
                break
            for y in self.adjacency[x]:
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
        path = []
        x = b
        while parent[x] is not None:
            path.append((parent[x], x))
            x = parent[x]
        return path[::-1]

    def distances_from(self, source: int) -> Dict[int, Fraction]:
        dist = {source: Fraction(0)}
        stack = [source]
        while stack:
            x = stack.pop()
            for y, w in self.adjacency[x].items():
                if y not in dist:
                    dist[y] = dist[x] + w
                    stack.append(y)
        return dist

    def edge_splits(self) -> Dict[frozenset, Fraction]:
        """Map each edge to its weight, keyed by the leaf labels on the side away from label 1."""
        root = self.leaves[0]
        parent = {root: None}
        order = [root]
        for x in order:
            for y in self.adjacency[x]:
                if y not in parent:
                    parent[y] = x
                    order.append(y)
        below: Dict[int, set] = {}
        for x in reversed(order):
            s = {self.label_of[x]} if x in self.label_of and x != root else set()
            for y in self.adjacency[x]:
                if parent.get(y) == x:
                    s |= below[y]
            below[x] = s
        return {
            frozenset(below[x]): self.adjacency[x][parent[x]]
            for x in order
            if parent[x] is not None
        }

    def internal_edge_count(self) -> int:
        return sum(1 for side in self.edge_splits() if 1 < len(side) < self.n - 1)

    def canonical(self) -> frozenset:
        """Isomorphism-invariant form of the labeled weighted tree."""
        return frozenset(self.edge_splits().items())

    def as_graph(self) -> WeightedGraph:
        return WeightedGraph(self.vertex_count, self.edges, self.leaves)

    def reweighted(self, weight_of) -> "WeightedTree":
        return WeightedTree(
            self.vertex_count,
            tuple((u, v, as_rational(weight_of(u, v, w))) for u, v, w in self.edges),
            self.leaves,
        )


def tree_two_weights(tree: WeightedTree) -> DissimilarityVector:
    """Sum of edge weights along the leaf-to-leaf path, for every pair of labels."""
    values = {}
    for k in range(1, tree.n + 1):
        dist = tree.distances_from(tree.leaves[k - 1])
        for l in range(k + 1, tree.n + 1):
            values[(k, l)] = dist[tree.leaves[l - 1]]
    return DissimilarityVector(tree.n, values)


def graph_two_weights(graph: WeightedGraph) -> DissimilarityVector:
    """Shortest-path distances between labeled vertices of a positive-weighted graph."""
    for u, v, w in graph.edges:
        if w <= 0:
            raise VariantError(
                f"edge ({u}, {v}) has weight {fmt(w)}; 2-weights are only computed for positive graphs"
            )
    V = graph.vertex_count
    dist: list[list] = [[None] * V for _ in range(V)]
    for v in range(V):
        dist[v][v] = Fraction(0)
    for u, v, w in graph.edges:
        dist[u][v] = dist[v][u] = w
    for k in range(V):
        dk = dist[k]
        for i in range(V):
            dik = dist[i][k]
            if dik is None:
                continue
            di = dist[i]
            for j in range(V):
                if dk[j] is None:
                    continue
                cand = dik + dk[j]
                if di[j] is None or cand < di[j]:
                    di[j] = cand
    values = {
        (k, l): dist[graph.labels[k - 1]][graph.labels[l - 1]]
        for k, l in all_pairs(graph.n)
    }
    return DissimilarityVector(graph.n, values)


@dataclass(frozen=True)
class PairReport:
    pair: Pair
    value: Fraction
    lo: Fraction
    hi: Fraction
    ok: bool


@dataclass(frozen=True)
class Verification:
    """Outcome of checking a witness against an interval family; truthy iff it passes."""

    pairs: Tuple[PairReport, ...]
    issues: Tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.issues and all(r.ok for r in self.pairs)

    def __bool__(self) -> bool:
        return self.ok

    def failures(self) -> list[PairReport]:
        return [r for r in self.pairs if not r.ok]


def check_distances(d: DissimilarityVector, family: IntervalFamily, issues: Sequence[str] = ()) -> Verification:
    if d.n != family.n:
        return Verification((), (f"witness has {d.n} labels, instance has {family.n}",))
    reports = tuple(
        PairReport(p, v, *family.bounds[p], family.admits(p, v)) for p, v in d.items()
    )
    return Verification(reports, tuple(issues))


def quartets(n: int) -> Iterator[Tuple[int, int, int, int]]:
    return itertools.combinations(range(1, n + 1), 4)
