"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Runs under pytest, or standalone with ``python3 tests/test_acceptance.py``.
Suites 1-4 are cached so the certificate check reuses their outcomes.
"""
import functools
import json
import random
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from rangereal.cli import main  # noqa: E402
from rangereal.core import IntervalFamily, tree_two_weights  # noqa: E402
from rangereal.graph import certificate_holds, decide_graph, verify_graph  # noqa: E402
from rangereal.linsys import fm_feasible, check_sample  # noqa: E402
from rangereal.oracle import brute_force_graph_decide, brute_force_tree_decide, mixed_instance, random_tree  # noqa: E402
from rangereal.splits import topologies, tree_induced_splits  # noqa: E402
from rangereal.tree import decide_tree, verify_tree  # noqa: E402

from helpers import (  # noqa: E402
    assert_same_space,
    epsilon_feasible_set,
    holds_for_every_positive_eps,
    nonstrict,
    relaxation_case,
    to_constraints,
)

GOLDEN = Path(__file__).resolve().parent.parent / "golden"
TREE_VARIANTS = ("tree-general-open", "tree-general-closed", "tree-positive-open")
GRID = (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


@dataclass
class Outcome:
    ok: bool
    detail: str
    infeasible: list = field(default_factory=list)


def report(k, outcome):
    print(f"criterion {k}: {'PASS' if outcome.ok else 'FAIL'} - {outcome.detail}", flush=True)


def _small_denominators(family, limit=16):
    return all(v.denominator <= limit for lo_hi in family.bounds.values() for v in lo_hi)


@functools.lru_cache(maxsize=None)
def graph_suite():
    bad, elapsed, feasible, infeasible = [], 0.0, 0, []
    for k in range(300):
        family = mixed_instance(3 + k % 4, "graph-closed", k)
        if not _small_denominators(family):
            bad.append((k, "denominator"))
        start = time.perf_counter()
        res = decide_graph(family)
        elapsed += time.perf_counter() - start
        if res.feasible != brute_force_graph_decide(family).feasible:
            bad.append((k, "disagrees"))
        elif res.feasible:
            feasible += 1
            if not verify_graph(res.witness, family):
                bad.append((k, "witness"))
        else:
            infeasible.append((family, res))
    ok = not bad and elapsed < 10
    detail = f"300 instances, {feasible} feasible, decide time {elapsed:.2f}s, problems {bad[:5]}"
    return Outcome(ok, detail, infeasible)


@functools.lru_cache(maxsize=None)
def tree_suite(variant):
    bad, elapsed, feasible, infeasible = [], 0.0, 0, []
    for k in range(200):
        family = mixed_instance(4 + k % 2, variant, k)
        start = time.perf_counter()
        res = decide_tree(family, "topology")
        elapsed += time.perf_counter() - start
        if res.feasible != brute_force_tree_decide(family).feasible:
            bad.append((k, "disagrees"))
        elif res.feasible:
            feasible += 1
            if not verify_tree(res.witness, family):
                bad.append((k, "witness"))
        else:
            infeasible.append(res)
    ok = not bad and elapsed < 60
    detail = f"{variant}: 200 instances, {feasible} feasible, decide time {elapsed:.2f}s, problems {bad[:5]}"
    return Outcome(ok, detail, infeasible)


@functools.lru_cache(maxsize=None)
def round_trip_suite():
    bad, infeasible, counts = [], [], {}
    for n in range(4, 8):
        rng = random.Random(1000 + n)
        for k in range(100):
            truth = random_tree(n, rng, (Fraction(0), Fraction(5)), positive=True)
            family = IntervalFamily.around(tree_two_weights(truth), Fraction(1, 4), "tree-positive-open")
            res = decide_tree(family)
            if not res.feasible:
                bad.append((n, k))
                infeasible.append(res)
            elif not verify_tree(res.witness, family):
                bad.append((n, k))
        counts[n] = 100 - sum(1 for m, _ in bad if m == n)
    detail = f"recovered per n {counts}, failures {bad[:5]}"
    return Outcome(not bad, detail, infeasible)


@functools.lru_cache(maxsize=None)
def point_suite():
    bad, infeasible = [], []
    rng = random.Random(4)
    for k in range(100):
        n = 4 + k % 3
        truth = random_tree(n, rng, (Fraction(-3), Fraction(5)))
        dist = tree_two_weights(truth)
        family = IntervalFamily.around(dist, 0, "tree-general-closed")
        res = decide_tree(family)
        if not res.feasible:
            bad.append(k)
            infeasible.append(res)
        elif tree_two_weights(res.witness) != dist:
            bad.append(k)
    return Outcome(not bad, f"100 point metrics, n in 4..6, failures {bad[:5]}", infeasible)


def criterion_1():
    return graph_suite()


def criterion_2():
    parts = [tree_suite(v) for v in TREE_VARIANTS]
    return Outcome(all(p.ok for p in parts), "; ".join(p.detail for p in parts))


def criterion_3():
    return round_trip_suite()


def criterion_4():
    return point_suite()


def criterion_5():
    rng = random.Random(5)
    failures, total = [], 0
    for n in range(4, 8):
        for idx, tree in enumerate(topologies(n)):
            total += 1
            try:
                assert_same_space(tree_induced_splits(tree), rng)
            except AssertionError:
                failures.append((n, idx))
    return Outcome(not failures, f"{total} topologies with n in 4..7, failures {failures[:5]}")


def criterion_6():
    graph_cases = graph_suite().infeasible
    tree_cases = [r for v in TREE_VARIANTS for r in tree_suite(v).infeasible]
    tree_cases += round_trip_suite().infeasible + point_suite().infeasible
    graph_bad = sum(1 for family, res in graph_cases if not certificate_holds(family, res))
    rejections = [rej for res in tree_cases for rej in res.rejections]
    tree_bad = sum(1 for rej in rejections if not rej.certificate.validate(rej.constraints))
    empty = sum(1 for res in tree_cases if not res.rejections)
    ok = graph_bad == tree_bad == empty == 0
    detail = (f"{len(graph_cases)} graph certificates ({graph_bad} invalid), {len(tree_cases)} tree outcomes "
              f"with {len(rejections)} candidate certificates ({tree_bad} invalid, {empty} outcomes without any)")
    return Outcome(ok, detail)


def criterion_7():
    counts = dict(grid=0, exact=0, counterexamples=0, grid_only=0, oracle_mismatch=0)
    for seed in range(200):
        names, rows, z = relaxation_case(seed)
        grid_results = []
        for eps in GRID:
            system = to_constraints(rows, eps, z)
            res = fm_feasible(system)
            grid_results.append(res.feasible)
            ok = check_sample(system, res.assignment) if res.feasible else res.certificate.validate(system)
            if not ok:
                counts["oracle_mismatch"] += 1
        base = fm_feasible(nonstrict(rows))
        base_ok = base.feasible and check_sample(nonstrict(rows), base.assignment)
        exact = holds_for_every_positive_eps(rows, z, names)
        counts["grid"] += all(grid_results)
        counts["exact"] += exact
        if (all(grid_results) or exact) and not base_ok:
            counts["counterexamples"] += 1
        if all(grid_results) and not exact:
            # solvable on the grid only: the hypothesis fails below the threshold
            counts["grid_only"] += 1
            threshold = epsilon_feasible_set(rows, z, names)[0]
            small = to_constraints(rows, threshold / 2, z)
            res = fm_feasible(small)
            if res.feasible or not res.certificate.validate(small):
                counts["oracle_mismatch"] += 1
        found = epsilon_feasible_set(rows, z, names)
        for eps, got in zip(GRID, grid_results):
            expected = found is not None and (eps > found[0] or (eps == found[0] and found[1]))
            if expected != got:
                counts["oracle_mismatch"] += 1
    ok = counts["counterexamples"] == 0 and counts["oracle_mismatch"] == 0
    detail = (f"200 systems, {counts['grid']} solvable on the eps grid, {counts['exact']} for every eps > 0, "
              f"{counts['grid_only']} grid-only, {counts['counterexamples']} counterexamples, "
              f"{counts['oracle_mismatch']} projection/certificate mismatches")
    return Outcome(ok, detail)


GOLDEN_EXPECTED = {
    "triangle_infeasible": False,
    "triangle_feasible": True,
    "unit_quartet": True,
    "distinct_sums": False,
}


def criterion_8():
    problems = []
    with tempfile.TemporaryDirectory() as tmp:
        for name, feasible in GOLDEN_EXPECTED.items():
            instance = GOLDEN / f"{name}.instance.json"
            outputs = []
            for run in range(2):
                out = Path(tmp) / f"{name}.{run}.json"
                main(["decide", "--input", str(instance), "--emit-certificate", "--output", str(out)])
                outputs.append(out.read_bytes())
            expected = (GOLDEN / f"{name}.result.json").read_bytes()
            if not outputs[0] == outputs[1] == expected:
                problems.append(name)
            if json.loads(expected)["feasible"] is not feasible:
                problems.append(f"{name} decision")
    return Outcome(not problems, f"{len(GOLDEN_EXPECTED)} golden documents, mismatches {problems}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    outcome = CRITERIA[k]()
    with capsys.disabled():
        print()
        report(k, outcome)
    assert outcome.ok, outcome.detail


if __name__ == "__main__":
    results = {}
    for k, check in CRITERIA.items():
        results[k] = check()
        report(k, results[k])
    sys.exit(0 if all(r.ok for r in results.values()) else 1)
