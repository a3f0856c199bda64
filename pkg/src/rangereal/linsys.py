"""Exact linear algebra over distance unknowns.

Covers the split-equality system and two ways of parametrizing its solution
space, Fourier-Motzkin elimination over mixed strict / non-strict
inequalities, sample-point extraction, and infeasibility certificates
(nonnegative multipliers whose combination collapses to a contradiction).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .core import PreconditionError, all_pairs, fmt, pair
from .splits import SplitSystem, check_admissible

GT, GE, EQ = ">", ">=", "="
ZERO = Fraction(0)


def _var_key(v):
    return (type(v).__name__, v)


class LinExpr:
    """Affine form ``sum(c_v * v) + constant``; zero coefficients are never stored."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: Optional[Mapping] = None, const=0):
        self.coeffs: Dict[Hashable, Fraction] = {
            v: Fraction(c) for v, c in (coeffs or {}).items() if c != 0
        }
        self.const = Fraction(const)

    @classmethod
    def var(cls, v, coeff=1) -> "LinExpr":
        return cls({v: coeff})

    @classmethod
    def constant(cls, c) -> "LinExpr":
        return cls({}, c)

    def _combine(self, other, sign) -> "LinExpr":
        if not isinstance(other, LinExpr):
            other = LinExpr.constant(other)
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, ZERO) + sign * c
        return LinExpr(out, self.const + sign * other.const)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __neg__(self):
        return self * -1

    def __mul__(self, k):
        k = Fraction(k)
        return LinExpr({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LinExpr):
            return NotImplemented
        return self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()), self.const))

    @property
    def variables(self):
        return self.coeffs.keys()

    def is_constant(self) -> bool:
        return not self.coeffs

    def substitute(self, mapping: Mapping[Hashable, "LinExpr"]) -> "LinExpr":
        out = LinExpr.constant(self.const)
        for v, c in self.coeffs.items():
            out = out + (mapping[v] * c if v in mapping else LinExpr.var(v, c))
        return out

    def evaluate(self, values: Mapping) -> Fraction:
        return self.const + sum((c * values[v] for v, c in self.coeffs.items()), ZERO)

    def __repr__(self):
        terms = [f"{fmt(c)}*{v}" for v, c in sorted(self.coeffs.items(), key=lambda t: _var_key(t[0]))]
        if self.const or not terms:
            terms.append(fmt(self.const))
        return " + ".join(terms)


def x(i: int, j: int) -> LinExpr:
    """Distance unknown for the pair ``{i, j}``."""
    return LinExpr.var(pair(i, j))


@dataclass(frozen=True, eq=False)
class Constraint:
    expr: LinExpr
    sense: str
    label: str = ""

    def __post_init__(self):
        if self.sense not in (GT, GE, EQ):
            raise ValueError(f"unknown constraint sense {self.sense!r}")

    @property
    def strict(self) -> bool:
        return self.sense == GT

    def holds(self, values: Mapping) -> bool:
        v = self.expr.evaluate(values)
        return v > 0 if self.sense == GT else v >= 0 if self.sense == GE else v == 0

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return self.expr == other.expr and self.sense == other.sense

    def __hash__(self):
        return hash((self.expr, self.sense))

    def __repr__(self):
        tag = f"[{self.label}] " if self.label else ""
        return f"{tag}{self.expr!r} {self.sense} 0"


def gt(expr, label="") -> Constraint:
    return Constraint(expr, GT, label)


def ge(expr, label="") -> Constraint:
    return Constraint(expr, GE, label)


def eq(expr, label="") -> Constraint:
    return Constraint(expr, EQ, label)


@dataclass(frozen=True)
class Parametrization:
    """Pivot unknowns written as affine forms over the free unknowns."""

    pivots: Dict[Hashable, LinExpr]
    free: Tuple[Hashable, ...]

    @property
    def dimension(self) -> int:
        return len(self.free)

    def expr(self, v) -> LinExpr:
        return self.pivots[v] if v in self.pivots else LinExpr.var(v)

    def lift(self, free_values: Mapping) -> Dict[Hashable, Fraction]:
        values = {v: Fraction(free_values.get(v, 0)) for v in self.free}
        for v, e in self.pivots.items():
            values[v] = e.evaluate(values)
        return values

    def unknowns(self) -> List[Hashable]:
        return sorted(list(self.free) + list(self.pivots), key=_var_key)


@dataclass(frozen=True)
class Certificate:
    """Multipliers on constraint indices.

    Inequality rows carry nonnegative multipliers, equality rows any sign; the
    weighted sum of expressions is the constant ``residual``.
    """

    multipliers: Tuple[Tuple[int, Fraction], ...]
    residual: Fraction

    def combination(self, constraints: Sequence[Constraint]) -> LinExpr:
        total = LinExpr()
        for idx, c in self.multipliers:
            total = total + constraints[idx].expr * c
        return total

    def validate(self, constraints: Sequence[Constraint]) -> bool:
        strict_weight = False
        for idx, c in self.multipliers:
            if not 0 <= idx < len(constraints):
                return False
            row = constraints[idx]
            if row.sense != EQ and c < 0:
                return False
            if row.strict and c > 0:
                strict_weight = True
        total = self.combination(constraints)
        if not total.is_constant() or total.const != self.residual:
            return False
        return self.residual < 0 or (self.residual == 0 and strict_weight)


@dataclass(frozen=True)
class Sample:
    assignment: Dict[Hashable, Fraction]
    feasible = True


@dataclass(frozen=True)
class Infeasible:
    certificate: Certificate
    feasible = False


FMResult = Union[Sample, Infeasible]


def split_equalities(system: SplitSystem) -> List[Constraint]:
    """``x_ac - x_bc - x_ad + x_bd = 0`` for each member ``(a,b|c,d)``."""
    out = []
    for s in system:
        (a, b), (c, d) = s.left, s.right
        out.append(eq(x(a, c) - x(b, c) - x(a, d) + x(b, d), label=f"split{s}"))
    return out


def solve_equalities(eqs: Iterable[Constraint], unknowns: Optional[Sequence] = None) -> Parametrization:
    """Reduced row echelon form with pivots taken left to right in ``unknowns`` order.

    The equalities must be homogeneous (a nonzero constant raises).
    """
    rows = [c.expr for c in eqs]
    if any(c.sense != EQ for c in eqs if isinstance(c, Constraint)):
        raise ValueError("solve_equalities takes equality constraints only")
    if unknowns is None:
        unknowns = sorted({v for r in rows for v in r.variables}, key=_var_key)
    order = list(unknowns)
    work = [dict(r.coeffs) for r in rows if r.coeffs or r.const]
    if any(r.const for r in rows):
        raise ValueError("solve_equalities expects homogeneous equalities")
    pivots: Dict[Hashable, Dict[Hashable, Fraction]] = {}
    for v in order:
        src = next((r for r in work if r.get(v)), None)
        if src is None:
            continue
        work.remove(src)
        c = src[v]
        src = {u: a / c for u, a in src.items()}
        for r in work:
            _eliminate(r, src, v)
        for row in pivots.values():
            _eliminate(row, src, v)
        pivots[v] = src
    free = tuple(v for v in order if v not in pivots)
    exprs = {v: LinExpr({u: -a for u, a in row.items() if u != v}) for v, row in pivots.items()}
    return Parametrization(exprs, free)


def _eliminate(row: Dict, pivot_row: Dict, v) -> None:
    c = row.get(v)
    if not c:
        return
    for u, a in pivot_row.items():
        val = row.get(u, ZERO) - c * a
        if val:
            row[u] = val
        else:
            row.pop(u, None)


def sistug_parametrization(system: SplitSystem) -> Parametrization:
    """Leaf-by-leaf parametrization of the split-equality solution space.

    Distances among leaves 1..3 are free. Leaf ``m`` then gets ``D_{m,k}``
    for ``k = 1..m-1`` in turn: pinned to ``D_{m,i} + D_{x,k} - D_{x,i}``
    for the smallest ``(x, i)`` with ``(m,x | k,i)`` in the system and
    ``i < k``, otherwise a fresh free unknown.
    """
    failure = check_admissible(system)
    if failure:
        name, witness = failure
        raise PreconditionError(f"split system fails {name}: {witness}")
    n = system.n
    exprs: Dict[Tuple[int, int], LinExpr] = {}
    free: List[Tuple[int, int]] = []
    pinned: Dict[Tuple[int, int], LinExpr] = {}

    def fresh(p):
        free.append(p)
        exprs[p] = LinExpr.var(p)

    for p in all_pairs(min(n, 3)):
        fresh(p)
    for m in range(4, n + 1):
        for k in range(1, m):
            rule = next(
                (
                    (xx, i)
                    for xx in range(1, m)
                    for i in range(1, k)
                    if xx != k and xx != i and system.has(m, xx, k, i)
                ),
                None,
            )
            if rule is None:
                fresh(pair(m, k))
                continue
            xx, i = rule
            e = exprs[pair(m, i)] + exprs[pair(xx, k)] - exprs[pair(xx, i)]
            exprs[pair(m, k)] = e
            pinned[pair(m, k)] = e
    return Parametrization(pinned, tuple(free))


# --- Fourier-Motzkin -------------------------------------------------------

@dataclass
class _Row:
    coeffs: Dict[Hashable, Fraction]
    const: Fraction
    strict: bool
    history: Dict[int, Fraction] = field(default_factory=dict)
    # bitmask of original inequality rows this row combines (equalities excluded)
    support: int = 0

    def scaled(self, k: Fraction) -> "_Row":
        return _Row(
            {v: c * k for v, c in self.coeffs.items()},
            self.const * k,
            self.strict,
            {i: c * k for i, c in self.history.items()},
            self.support,
        )


def _normalize(row: _Row) -> _Row:
    # scale so the leading coefficient has absolute value 1 (keeps direction)
    if not row.coeffs:
        return row
    lead = min(row.coeffs, key=_var_key)
    return row.scaled(1 / abs(row.coeffs[lead]))


def _combine(pos: _Row, neg: _Row, v) -> _Row:
    a, b = pos.coeffs[v], -neg.coeffs[v]
    coeffs = {}
    for u in set(pos.coeffs) | set(neg.coeffs):
        if u == v:
            continue
        c = b * pos.coeffs.get(u, ZERO) + a * neg.coeffs.get(u, ZERO)
        if c:
            coeffs[u] = c
    history = dict()
    for i, c in pos.history.items():
        history[i] = history.get(i, ZERO) + b * c
    for i, c in neg.history.items():
        history[i] = history.get(i, ZERO) + a * c
    history = {i: c for i, c in history.items() if c}
    return _Row(coeffs, b * pos.const + a * neg.const, pos.strict or neg.strict, history,
                pos.support | neg.support)


class _Contradiction(Exception):
    def __init__(self, row: _Row):
        self.row = row


def _is_contradiction(row: _Row) -> bool:
    return not row.coeffs and (row.const < 0 or (row.const == 0 and row.strict))


def _at_least_as_tight(a: _Row, b: _Row) -> bool:
    # parallel rows: a*x + c > 0 with smaller c is tighter; at equal c strict wins
    return a.const < b.const or (a.const == b.const and (a.strict or not b.strict))


def _prune(rows: Iterable[_Row], safe: bool = False) -> List[_Row]:
    """Drop tautologies and dominated parallel rows; raise on contradictions.

    The fast mode keeps only the tightest row of each parallel group. The
    counting rule of ``_drop_non_extreme`` can then miss a contradiction whose
    small-support parents were dropped for a tighter row, so ``fm_feasible``
    checks fast-mode samples and reruns in safe mode, where a parallel row is
    only dropped for a tighter one whose support is a subset of its own.
    """
    groups: Dict[frozenset, List[_Row]] = {}
    for row in rows:
        if not row.coeffs:
            if _is_contradiction(row):
                raise _Contradiction(row)
            continue
        row = _normalize(row)
        group = groups.setdefault(frozenset(row.coeffs.items()), [])
        if not safe:
            old = group[0] if group else None
            if old is None:
                group.append(row)
            elif row.const < old.const or (row.const == old.const and row.strict and not old.strict):
                group[0] = row
            continue
        if any(_at_least_as_tight(old, row) and old.support & row.support == old.support for old in group):
            continue
        group[:] = [old for old in group if not (_at_least_as_tight(row, old) and row.support & old.support == row.support)]
        group.append(row)
    return [r for group in groups.values() for r in group]


def _rows_from(constraints: Sequence[Constraint]) -> Tuple[List[_Row], List[Tuple[int, _Row]]]:
    ineqs, eqs = [], []
    for idx, c in enumerate(constraints):
        support = 0 if c.sense == EQ else 1 << idx
        row = _Row(dict(c.expr.coeffs), c.expr.const, c.strict, {idx: Fraction(1)}, support)
        (eqs if c.sense == EQ else ineqs).append(row)
    return ineqs, eqs


def _drop_non_extreme(kept: List[_Row], derived: List[_Row], eliminated: int) -> List[_Row]:
    """Chernikov's rules for new rows: after ``k`` eliminations a row combining
    more than ``k + 1`` originals, or a strict superset of another row's
    originals, is implied by the rest (strictness included), so dropping it
    keeps the projection.
    """
    masks = [r.support for r in kept]
    out = list(kept)
    sized = sorted(
        ((r.support.bit_count(), r) for r in derived if r.support.bit_count() <= eliminated + 1),
        key=lambda t: t[0],
    )
    for _, r in sized:
        m = r.support
        if any(k & m == k and k != m for k in masks):
            continue
        out.append(r)
        masks.append(m)
    return out


def _eliminate_row_var(rows: List[_Row], v, eliminated: int = 0, safe: bool = False) -> Tuple[List[_Row], List[_Row]]:
    """One elimination step; returns ``(rows mentioning v, resulting rows)``.

    ``eliminated`` counts the unknowns already projected out before this one.
    """
    pos, neg, rest = [], [], []
    for r in rows:
        c = r.coeffs.get(v)
        if c is None:
            rest.append(r)
        elif c > 0:
            pos.append(r)
        else:
            neg.append(r)
    limit = eliminated + 2
    derived = [_combine(p, q, v) for p in pos for q in neg if (p.support | q.support).bit_count() <= limit]
    return pos + neg, _prune(_drop_non_extreme(rest, derived, eliminated + 1), safe)


def fm_eliminate(constraints: Sequence[Constraint], var) -> List[Constraint]:
    """Project ``var`` out of a system of strict / non-strict inequalities.

    Each lower bound is paired with each upper bound; the combination is
    strict when either parent is. Rows without ``var`` pass through
    unchanged. A contradiction shows up as a constant row such as ``0 > 0``.
    """
    if any(c.sense == EQ for c in constraints):
        raise ValueError("substitute equalities before eliminating")
    out = []
    pos, neg = [], []
    for c in constraints:
        a = c.expr.coeffs.get(var)
        if a is None:
            out.append(c)
        elif a > 0:
            pos.append(c)
        else:
            neg.append(c)
    for p in pos:
        for q in neg:
            a, b = p.expr.coeffs[var], -q.expr.coeffs[var]
            expr = (p.expr * b + q.expr * a) * (1 / (a * b))
            out.append(Constraint(expr, GT if (p.strict or q.strict) else GE))
    return out


def _substitute_equalities(ineqs: List[_Row], eqs: List[_Row]):
    """Gaussian elimination on the equality rows, substituted into the inequalities.

    Returns ``(inequalities, pivot rows)`` where each pivot row expresses one
    unknown; raises ``_Contradiction`` for an inconsistent equality.
    """
    pivots: List[Tuple[Hashable, _Row]] = []
    pending = list(eqs)
    while pending:
        row = pending.pop(0)
        if not row.coeffs:
            if row.const != 0:
                raise _Contradiction(row.scaled(Fraction(-1)) if row.const > 0 else row)
            continue
        v = min(row.coeffs, key=_var_key)
        row = row.scaled(1 / row.coeffs[v])

        def sub(r: _Row) -> _Row:
            c = r.coeffs.get(v)
            if c is None:
                return r
            return _add(r, row.scaled(-c))

        pending = [sub(r) for r in pending]
        pivots = [(u, sub(r)) for u, r in pivots]
        ineqs = [sub(r) for r in ineqs]
        pivots.append((v, row))
    return ineqs, pivots


def _add(r: _Row, s: _Row) -> _Row:
    coeffs = dict(r.coeffs)
    for u, c in s.coeffs.items():
        val = coeffs.get(u, ZERO) + c
        if val:
            coeffs[u] = val
        else:
            coeffs.pop(u, None)
    history = dict(r.history)
    for i, c in s.history.items():
        val = history.get(i, ZERO) + c
        if val:
            history[i] = val
        else:
            history.pop(i, None)
    return _Row(coeffs, r.const + s.const, r.strict or s.strict, history, r.support | s.support)


def _pick_value(lower, lower_strict, upper, upper_strict) -> Fraction:
    if lower is not None and not lower_strict:
        return lower
    if upper is not None and not upper_strict:
        return upper
    if lower is not None and upper is not None:
        return (lower + upper) / 2
    if lower is not None:
        return lower + 1
    if upper is not None:
        return upper - 1
    return ZERO


def _bounds_for(v, rows: List[_Row], values: Mapping):
    lower = upper = None
    lower_strict = upper_strict = False
    for r in rows:
        a = r.coeffs[v]
        rest = r.const + sum((c * values[u] for u, c in r.coeffs.items() if u != v), ZERO)
        bound = -rest / a
        if a > 0:
            if lower is None or bound > lower or (bound == lower and r.strict):
                lower, lower_strict = bound, r.strict
        else:
            if upper is None or bound < upper or (bound == upper and r.strict):
                upper, upper_strict = bound, r.strict
    return lower, lower_strict, upper, upper_strict


def _certificate(row: _Row, constraints: Sequence[Constraint]) -> Certificate:
    multipliers = tuple(sorted((i, c) for i, c in row.history.items() if c))
    cert = Certificate(multipliers, ZERO)
    total = cert.combination(constraints)
    return Certificate(multipliers, total.const)


def _run_fm(constraints: List[Constraint], all_vars, safe: bool) -> FMResult:
    ineqs, eqs = _rows_from(constraints)
    try:
        ineqs, pivots = _substitute_equalities(ineqs, eqs)
        rows = _prune(ineqs, safe)
        steps: List[Tuple[Hashable, List[_Row]]] = []
        remaining = set(all_vars) - {v for v, _ in pivots}
        while remaining:
            counts = {v: 0 for v in remaining}
            for r in rows:
                for u in r.coeffs:
                    counts[u] += 1
            v = min(remaining, key=lambda u: (counts[u], _var_key(u)))
            involved, rows = _eliminate_row_var(rows, v, len(steps), safe)
            steps.append((v, involved))
            remaining.discard(v)
    except _Contradiction as bad:
        return Infeasible(_certificate(bad.row, constraints))
    values: Dict[Hashable, Fraction] = {}
    for v, involved in reversed(steps):
        values[v] = _pick_value(*_bounds_for(v, involved, values))
    for v, row in reversed(pivots):
        values[v] = -(row.const + sum((c * values[u] for u, c in row.coeffs.items() if u != v), ZERO))
    return Sample(values)


def fm_feasible(constraints: Sequence[Constraint], variables: Optional[Iterable] = None) -> FMResult:
    """Decide a mixed system exactly.

    Equalities are substituted first, then unknowns are eliminated one at a
    time (fewest occurrences first, ties by unknown order). A feasible system
    yields a rational sample satisfying every row; an infeasible one yields a
    certificate whose multipliers were carried through the elimination.

    The first pass prunes aggressively. Its certificates are always sound;
    its sample is checked against every row, and a failing sample triggers a
    second pass with the conservative pruning.
    """
    constraints = list(constraints)
    all_vars = set(variables or ())
    for c in constraints:
        all_vars.update(c.expr.variables)
    result = _run_fm(constraints, all_vars, safe=False)
    if isinstance(result, Sample) and not check_sample(constraints, result.assignment):
        result = _run_fm(constraints, all_vars, safe=True)
    return result


def check_sample(constraints: Sequence[Constraint], values: Mapping) -> bool:
    return all(c.holds(values) for c in constraints)


__all__ = [
    "Certificate",
    "Constraint",
    "EQ",
    "FMResult",
    "GE",
    "GT",
    "Infeasible",
    "LinExpr",
    "Parametrization",
    "Sample",
    "check_sample",
    "eq",
    "fm_eliminate",
    "fm_feasible",
    "ge",
    "gt",
    "sistug_parametrization",
    "solve_equalities",
    "split_equalities",
    "x",
]
