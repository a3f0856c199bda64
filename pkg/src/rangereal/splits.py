"""Quartet split systems: predicates, tree-induced systems, candidate search."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator, NamedTuple, Optional, Tuple

from .core import WeightedTree, quartets


class QuartetSplit(NamedTuple):
    """``(a,b | c,d)`` stored canonically: ``a < b``, ``c < d``, ``a < c``."""

    left: Tuple[int, int]
    right: Tuple[int, int]

    @classmethod
    def of(cls, a: int, b: int, c: int, d: int) -> "QuartetSplit":
        if len({a, b, c, d}) != 4:
            raise ValueError(f"a quartet split needs four distinct labels, got {(a, b, c, d)}")
        p = (a, b) if a < b else (b, a)
        q = (c, d) if c < d else (d, c)
        return cls(p, q) if p < q else cls(q, p)

    @property
    def quartet(self) -> Tuple[int, int, int, int]:
        return tuple(sorted(self.left + self.right))

    def __str__(self):
        return f"({self.left[0]},{self.left[1]}|{self.right[0]},{self.right[1]})"


def quartet_splits(q) -> Tuple[QuartetSplit, QuartetSplit, QuartetSplit]:
    """The three splits of a quartet, in the fixed order ab|cd, ac|bd, ad|bc."""
    a, b, c, d = sorted(q)
    return (QuartetSplit.of(a, b, c, d), QuartetSplit.of(a, c, b, d), QuartetSplit.of(a, d, b, c))


@dataclass(frozen=True)
class SplitSystem:
    n: int
    members: FrozenSet[QuartetSplit]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        for s in self.members:
            if not all(1 <= x <= self.n for x in s.quartet):
                raise ValueError(f"split {s} uses a label outside 1..{self.n}")

    @classmethod
    def of(cls, n: int, splits: Iterable) -> "SplitSystem":
        return cls(n, frozenset(s if isinstance(s, QuartetSplit) else QuartetSplit.of(*s) for s in splits))

    def has(self, a: int, b: int, c: int, d: int) -> bool:
        return QuartetSplit.of(a, b, c, d) in self.members

    def __contains__(self, split) -> bool:
        return split in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def on(self, q) -> Tuple[QuartetSplit, ...]:
        return tuple(s for s in quartet_splits(q) if s in self.members)

    def single_split(self, q) -> Optional[QuartetSplit]:
        """The split of ``q`` if it is the only one of its quartet in the system."""
        present = self.on(q)
        return present[0] if len(present) == 1 else None

    def key(self) -> Tuple[QuartetSplit, ...]:
        return tuple(sorted(self.members))

    def __str__(self):
        return "{" + ", ".join(str(s) for s in self) + "}"


@dataclass(frozen=True)
class Check:
    """Predicate outcome; truthy iff it holds, ``counterexample`` explains a failure."""

    ok: bool
    counterexample: object = None

    def __bool__(self) -> bool:
        return self.ok


def is_fat(system: SplitSystem) -> Check:
    for q in quartets(system.n):
        if len(system.on(q)) not in (1, 3):
            return Check(False, q)
    return Check(True)


def _transitivity_failure(has, split: QuartetSplit, others: Iterable[int]):
    # (X | c,d) and (X | c,e) force (X | d,e), with X either side of the split
    for fixed, (c0, d0) in ((split.left, split.right), (split.right, split.left)):
        for c, d in ((c0, d0), (d0, c0)):
            for e in others:
                if has(*fixed, c, e) and not has(*fixed, d, e):
                    return (QuartetSplit.of(*fixed, c, d), QuartetSplit.of(*fixed, c, e), QuartetSplit.of(*fixed, d, e))
    return None


def _saturation_failure(has, split: QuartetSplit, others: Iterable[int]):
    # every reading (a1,a2 | b1,b2) of the unordered split must extend to x
    for side_a, side_b in ((split.left, split.right), (split.right, split.left)):
        for a1, a2 in (side_a, side_a[::-1]):
            for b1, b2 in (side_b, side_b[::-1]):
                for x in others:
                    if not has(a1, x, b1, b2) and not has(a1, a2, b1, x):
                        return (split, x, (a1, a2, b1, b2))
    return None


def is_transitive(system: SplitSystem) -> Check:
    """Failure carries the two premises and the missing conclusion."""
    labels = range(1, system.n + 1)
    for s in sorted(system.members):
        others = [x for x in labels if x not in s.quartet]
        bad = _transitivity_failure(system.has, s, others)
        if bad:
            return Check(False, bad)
    return Check(True)


def is_saturated(system: SplitSystem) -> Check:
    """Failure carries ``(split, x, reading)`` where neither replacement is present."""
    labels = range(1, system.n + 1)
    for s in sorted(system.members):
        others = [x for x in labels if x not in s.quartet]
        bad = _saturation_failure(system.has, s, others)
        if bad:
            return Check(False, bad)
    return Check(True)


def check_admissible(system: SplitSystem) -> Optional[Tuple[str, object]]:
    """First failing predicate among fat / transitive / saturated, or ``None``."""
    for name, pred in (("is_fat", is_fat), ("is_transitive", is_transitive), ("is_saturated", is_saturated)):
        result = pred(system)
        if not result:
            return name, result.counterexample
    return None


def tree_induced_splits(tree: WeightedTree) -> SplitSystem:
    """``(a,b|c,d)`` is included when some edge separates ``{a,b}`` from ``{c,d}``;
    a quartet no edge resolves contributes all three splits.
    """
    n = tree.n
    if n < 4:
        return SplitSystem(n, frozenset())
    sides = [side for side in tree.edge_splits() if 1 < len(side) < n - 1]
    members = set()
    for q in quartets(n):
        resolved = None
        for s in quartet_splits(q):
            for side in sides:
                a, b = (x in side for x in s.left)
                c, d = (x in side for x in s.right)
                if a == b and c == d and a != c:
                    resolved = s
                    break
            if resolved:
                break
        members.update((resolved,) if resolved else quartet_splits(q))
    return SplitSystem(n, frozenset(members))


def _unit_tree(edges, n) -> WeightedTree:
    return WeightedTree.from_edges([(u, v, 1) for u, v in edges], {k: ("L", k) for k in range(1, n + 1)})


def _insertions(edges: Tuple, k: int, fresh) -> Iterator[Tuple]:
    """All ways to hang leaf ``k`` on a topology: subdivide an edge or join an internal vertex."""
    leaf = ("L", k)
    for idx, (u, v) in enumerate(edges):
        m = fresh()
        yield edges[:idx] + edges[idx + 1:] + ((u, m), (m, v), (m, leaf))
    internal = sorted({x for e in edges for x in e if x[0] == "I"})
    for w in internal:
        yield edges + ((w, leaf),)


@lru_cache(maxsize=None)
def topologies(n: int) -> Tuple[WeightedTree, ...]:
    """Every leaf-labeled tree on ``[n]`` with internal degrees >= 3, unit weights,
    ordered by internal-edge count and then by induced split system.
    """
    if n < 2:
        raise ValueError("topologies need n >= 2")
    return tuple(t for t, _ in _topologies_with_systems(n))


@lru_cache(maxsize=None)
def _topologies_with_systems(n: int) -> Tuple[Tuple[WeightedTree, "SplitSystem"], ...]:
    counter = itertools.count()

    def fresh():
        return ("I", next(counter))

    layer = [((("L", 1), ("L", 2)),)]
    for k in range(3, n + 1):
        layer = [new for edges in layer for new in _insertions(edges, k, fresh)]
    trees = [_unit_tree(edges, n) for edges in layer]
    tagged = [(t, tree_induced_splits(t)) for t in trees]
    return tuple(sorted(tagged, key=lambda ts: (ts[0].internal_edge_count(), ts[1].key())))


def random_topology(n: int, rng: random.Random, multifurcation: float = 0.2) -> Tuple[Tuple, ...]:
    """Random topology by sequential leaf insertion; returns named edges."""
    counter = itertools.count()

    def fresh():
        return ("I", next(counter))

    edges = ((("L", 1), ("L", 2)),)
    for k in range(3, n + 1):
        internal = sorted({x for e in edges for x in e if x[0] == "I"})
        if internal and rng.random() < multifurcation:
            edges = edges + ((rng.choice(internal), ("L", k)),)
        else:
            idx = rng.randrange(len(edges))
            u, v = edges[idx]
            m = fresh()
            edges = edges[:idx] + edges[idx + 1:] + ((u, m), (m, v), (m, ("L", k)))
    return edges


def _five_subset_ok(has, members_of, five) -> bool:
    for s in members_of(five):
        others = [x for x in five if x not in s.quartet]
        if _transitivity_failure(has, s, others) or _saturation_failure(has, s, others):
            return False
    return True


def _violations_known(status, split: QuartetSplit, others: Iterable[int]) -> bool:
    """True when transitivity or saturation already fails on assigned quartets.

    ``status(a,b,c,d)`` is True / False for decided quartets, None otherwise.
    """
    for fixed, (c0, d0) in ((split.left, split.right), (split.right, split.left)):
        for c, d in ((c0, d0), (d0, c0)):
            for e in others:
                if status(*fixed, c, e) and status(*fixed, d, e) is False:
                    return True
        for a1, a2 in (fixed, fixed[::-1]):
            for b1, b2 in ((c0, d0), (d0, c0)):
                for e in others:
                    if status(a1, e, b1, b2) is False and status(a1, a2, b1, e) is False:
                        return True
    return False


def _raw_systems(n: int) -> Iterator[SplitSystem]:
    qs = list(quartets(n))
    options = [[(s,) for s in quartet_splits(q)] + [quartet_splits(q)] for q in qs]
    decided: set = set()
    members: set = set()

    def status(a, b, c, d):
        if tuple(sorted((a, b, c, d))) not in decided:
            return None
        return QuartetSplit.of(a, b, c, d) in members

    def consistent(q) -> bool:
        # only implications that mention q can change status
        for e in range(1, n + 1):
            if e in q:
                continue
            five = sorted(q + (e,))
            for sub in itertools.combinations(five, 4):
                if sub not in decided:
                    continue
                for s in quartet_splits(sub):
                    if s in members and _violations_known(status, s, [y for y in five if y not in sub]):
                        return False
        return True

    def walk(idx):
        if idx == len(qs):
            yield SplitSystem(n, frozenset(members))
            return
        q = qs[idx]
        decided.add(q)
        for opt in options[idx]:
            members.update(opt)
            if consistent(q):
                yield from walk(idx + 1)
            members.difference_update(opt)
        decided.discard(q)

    yield from walk(0)


@lru_cache(maxsize=None)
def _topology_systems(n: int) -> Tuple[SplitSystem, ...]:
    return tuple(s for _, s in _topologies_with_systems(n))


def enumerate_candidate_systems(n: int, strategy: str = "topology") -> Iterator[SplitSystem]:
    """Candidate split systems for the tree deciders.

    ``topology`` yields the system induced by each labeled topology once;
    ``raw`` backtracks over per-quartet choices (one split or all three) and
    keeps the fat, transitive, saturated systems. ``raw`` is only practical
    for ``n <= 6``.
    """
    if n < 4:
        raise ValueError("candidate systems need n >= 4; smaller n has no quartets")
    if strategy == "topology":
        yield from _topology_systems(n)
    elif strategy == "raw":
        yield from _raw_systems(n)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")


def star_system(n: int) -> SplitSystem:
    return SplitSystem(n, frozenset(s for q in quartets(n) for s in quartet_splits(q)))


__all__ = [
    "Check",
    "QuartetSplit",
    "SplitSystem",
    "check_admissible",
    "enumerate_candidate_systems",
    "is_fat",
    "is_saturated",
    "is_transitive",
    "quartet_splits",
    "random_topology",
    "star_system",
    "topologies",
    "tree_induced_splits",
]
