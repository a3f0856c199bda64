"""Independent reference computations, hypothesis strategies and shared checks.

The reference computations call into the code under test only to build
inputs; the shared checks at the bottom compare two library routes.
"""
import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from rangereal.core import IntervalFamily, WeightedTree, all_pairs
from rangereal.linsys import LinExpr, ge, gt, sistug_parametrization, solve_equalities, split_equalities
from rangereal.oracle import random_graph, random_tree

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_fractions = st.fractions(min_value=-8, max_value=8, max_denominator=16)
positive_fractions = st.fractions(min_value=Fraction(1, 16), max_value=8, max_denominator=16)


@st.composite
def general_trees(draw, min_n=2, max_n=7):
    n = draw(st.integers(min_n, max_n))
    return random_tree(n, random.Random(draw(seeds)), (Fraction(-3), Fraction(5)))


@st.composite
def small_integer_trees(draw, min_n=3, max_n=8):
    """Weights in {-2, -1, 1, 2}: paths of total weight zero are common."""
    n = draw(st.integers(min_n, max_n))
    return random_tree(n, random.Random(draw(seeds)), (Fraction(-2), Fraction(2)), max_denominator=1, multifurcation=0.3)


@st.composite
def positive_trees(draw, min_n=2, max_n=7):
    n = draw(st.integers(min_n, max_n))
    return random_tree(n, random.Random(draw(seeds)), (Fraction(0), Fraction(5)), positive=True)


@st.composite
def positive_graphs(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    return random_graph(n, random.Random(draw(seeds)))


@st.composite
def graph_families(draw, min_n=2, max_n=5):
    n = draw(st.integers(min_n, max_n))
    bounds = {}
    for p in all_pairs(n):
        a, b = draw(positive_fractions), draw(positive_fractions)
        bounds[p] = (min(a, b), max(a, b))
    return IntervalFamily(n, bounds, "graph-closed")


# --- brute-force references --------------------------------------------------

def simple_path_distances(vertex_count, edges, labels):
    """Shortest labeled-vertex distances by enumerating every simple path."""
    adj = {v: {} for v in range(vertex_count)}
    for u, v, w in edges:
        adj[u][v] = w
        adj[v][u] = w
    best = {}
    for a, b in itertools.combinations(range(len(labels)), 2):
        src, dst = labels[a], labels[b]
        found = []

        def walk(v, seen, total):
            if v == dst:
                found.append(total)
                return
            for y, w in adj[v].items():
                if y not in seen:
                    walk(y, seen | {y}, total + w)

        walk(src, {src}, Fraction(0))
        best[a + 1, b + 1] = min(found)
    return best


def tree_path_distances(tree: WeightedTree):
    return simple_path_distances(tree.vertex_count, tree.edges, tree.leaves)


def path_vertices(tree: WeightedTree, a_label, b_label):
    adj = tree.adjacency
    src, dst = tree.leaves[a_label - 1], tree.leaves[b_label - 1]
    parent = {src: None}
    stack = [src]
    while stack:
        v = stack.pop()
        for y in adj[v]:
            if y not in parent:
                parent[y] = v
                stack.append(y)
    out = [dst]
    while out[-1] != src:
        out.append(parent[out[-1]])
    return set(out)


def restricted_split(tree: WeightedTree, q):
    """The quartet's split in the restricted topology, or None for a star.

    ``a, b | c, d`` holds exactly when the a-b path and the c-d path share no vertex.
    """
    a, b, c, d = q
    for (p, r), (s, t) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
        if not path_vertices(tree, p, r) & path_vertices(tree, s, t):
            return (p, r), (s, t)
    return None


def definitional_fat(system):
    for q in itertools.combinations(range(1, system.n + 1), 4):
        a, b, c, d = q
        count = sum(system.has(*s) for s in ((a, b, c, d), (a, c, b, d), (a, d, b, c)))
        if count not in (1, 3):
            return False
    return True


def definitional_transitive(system):
    for a, b, c, d, e in itertools.permutations(range(1, system.n + 1), 5):
        if system.has(a, b, c, d) and system.has(a, b, c, e) and not system.has(a, b, d, e):
            return False
    return True


def definitional_saturated(system):
    n = system.n
    for a1, a2, b1, b2 in itertools.permutations(range(1, n + 1), 4):
        if not system.has(a1, a2, b1, b2):
            continue
        for x in range(1, n + 1):
            if x in (a1, a2, b1, b2):
                continue
            if not system.has(a1, x, b1, b2) and not system.has(a1, a2, b1, x):
                return False
    return True


def chain_minimum(upper, n, i, j):
    """Smallest bound-sum over chains of distinct intermediates (exhaustive)."""
    others = [t for t in range(1, n + 1) if t not in (i, j)]
    best = None
    for k in range(len(others) + 1):
        for chain in itertools.permutations(others, k):
            stops = (i, *chain, j)
            total = sum(upper[min(a, b), max(a, b)] for a, b in zip(stops, stops[1:]))
            if best is None or total < best[0]:
                best = (total, chain)
    return best


def grid_point(constraints, variables, bound=3, max_denominator=4):
    """Search a rational grid for a point satisfying every constraint."""
    values = sorted({Fraction(p, q) for q in range(1, max_denominator + 1) for p in range(-bound * q, bound * q + 1)})
    for point in itertools.product(values, repeat=len(variables)):
        assignment = dict(zip(variables, point))
        if all(c.holds(assignment) for c in constraints):
            return assignment
    return None


# --- small random inequality systems and the epsilon relaxation ----------------

def random_rows(rng: random.Random, variables, rows=(3, 6), coeff=3, const=4):
    """``[(coeffs, constant, strict)]`` with small integer data; every row mentions a variable."""
    out = []
    for _ in range(rng.randint(*rows)):
        coeffs = {}
        while not coeffs:
            coeffs = {v: c for v in variables if (c := rng.randint(-coeff, coeff))}
        out.append((coeffs, Fraction(rng.randint(-const, const)), rng.random() < 0.5))
    return out


def eliminate_plain(rows, var):
    """Textbook pairwise projection of ``var`` out of ``(coeffs, const, strict)`` rows."""
    keep = [r for r in rows if not r[0].get(var)]
    pos = [r for r in rows if r[0].get(var, 0) > 0]
    neg = [r for r in rows if r[0].get(var, 0) < 0]
    for pc, pk, ps in pos:
        for nc, nk, ns in neg:
            a, b = pc[var], -nc[var]
            coeffs = {}
            for u in set(pc) | set(nc):
                val = b * pc.get(u, 0) + a * nc.get(u, 0)
                if val and u != var:
                    coeffs[u] = Fraction(val)
            keep.append((coeffs, b * pk + a * nk, ps or ns))
    return keep


def epsilon_feasible_set(rows, z, variables):
    """The epsilon values for which the relaxed system is solvable.

    Strict row ``i`` becomes ``L_i + z_i * eps > 0``; nonstrict rows stay as they
    are. Returns ``(threshold, closed)``: solvable exactly for eps above the
    threshold (and at it when ``closed``), or ``None`` if no eps works. The
    projection onto eps is computed by plain elimination of every variable.
    """
    relaxed = []
    k = 0
    for coeffs, const, strict in rows:
        c = dict(coeffs)
        if strict:
            c["eps"] = Fraction(z[k])
            k += 1
        relaxed.append((c, const, strict))
    for v in variables:
        relaxed = eliminate_plain(relaxed, v)
    threshold, closed = None, True
    for coeffs, const, strict in relaxed:
        a = coeffs.get("eps", 0)
        if a == 0:
            if const < 0 or (const == 0 and strict):
                return None
            continue
        assert a > 0  # nonnegative combinations of nonnegative eps weights
        t = -const / a
        if threshold is None or t > threshold or (t == threshold and strict):
            threshold, closed = t, not strict
    return (Fraction(-10**9) if threshold is None else threshold), closed


def holds_for_every_positive_eps(rows, z, variables):
    found = epsilon_feasible_set(rows, z, variables)
    return found is not None and found[0] <= 0


def relaxation_case(seed):
    """A small system with designated strict rows and positive integer relaxation weights."""
    rng = random.Random(seed)
    names = ["x", "y", "z"][: rng.randint(1, 3)]
    rows = random_rows(rng, names, rows=(2, 6))
    z = [rng.randint(1, 3) for _, _, s in rows if s]
    return names, rows, z


def to_constraints(rows, eps=None, z=None):
    """Rows as constraints; with ``eps`` given, strict rows are relaxed by ``z_i * eps``."""
    out, k = [], 0
    for coeffs, const, strict in rows:
        expr = LinExpr(coeffs, const)
        if eps is None:
            out.append(gt(expr) if strict else ge(expr))
            continue
        if strict:
            out.append(gt(expr + z[k] * eps))
            k += 1
        else:
            out.append(ge(expr))
    return out


def nonstrict(rows):
    return [ge(LinExpr(c, k)) for c, k, _ in rows]


def assert_same_space(system, rng):
    eqs = split_equalities(system)
    generic = solve_equalities(eqs, all_pairs(system.n))
    inductive = sistug_parametrization(system)
    assert inductive.dimension == generic.dimension >= 1
    p = inductive.lift({v: Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for v in inductive.free})
    assert all(c.holds(p) for c in eqs)
    q = generic.lift({v: Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for v in generic.free})
    # q lies in the inductive space: its free coordinates reproduce all of q
    assert inductive.lift({v: q[v] for v in inductive.free}) == q
