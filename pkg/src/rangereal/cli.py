"""Command line front end: ``decide``, ``verify`` and ``crosscheck``.

Documents are UTF-8 JSON with every rational written as a string
(``"3"`` or ``"-7/2"``). Exit status: 0 feasible / pass, 1 infeasible /
fail, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .core import (
    IntervalFamily,
    RealizationError,
    Variant,
    Verification,
    WeightedGraph,
    WeightedTree,
    all_pairs,
    fmt,
    graph_two_weights,
    tree_two_weights,
)
from .graph import GraphInfeasible, certificate_holds, chain_sum, decide_graph, verify_graph
from .linsys import Certificate, Constraint, LinExpr
from .oracle import (
    MAX_ORACLE_N,
    brute_force_graph_decide,
    brute_force_tree_decide,
    mixed_instance,
)
from .splits import SplitSystem
from .tree import TreeInfeasible, decide_star, decide_tree, verify_tree

EXIT_OK, EXIT_NO, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Malformed document; the message names the offending field."""


# --- reading ---------------------------------------------------------------

def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc: Dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected an object")
    if key not in doc:
        raise InputError(f"{where}: missing field '{key}'")
    return doc[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where}: expected an integer, got {json.dumps(value)}")
    return value


def _rational(value, where: str) -> Fraction:
    if not isinstance(value, str):
        raise InputError(f"{where}: rationals are written as strings like \"3/4\", got {json.dumps(value)}")
    text = value.strip()
    body = text[1:] if text[:1] in "+-" else text
    parts = body.split("/")
    if len(parts) > 2 or not all(p.isdigit() and p.isascii() for p in parts):
        raise InputError(f"{where}: not a rational literal: {value!r}")
    if len(parts) == 2 and int(parts[1]) == 0:
        raise InputError(f"{where}: zero denominator in {value!r}")
    return Fraction(text)


def parse_instance(doc: Any, where: str = "instance") -> IntervalFamily:
    n = _int(_field(doc, "n", where), f"{where}.n")
    if n < 2:
        raise InputError(f"{where}.n: need at least 2 points, got {n}")
    raw_variant = _field(doc, "variant", where)
    try:
        variant = Variant(raw_variant)
    except ValueError:
        names = ", ".join(v.value for v in Variant)
        raise InputError(f"{where}.variant: unknown variant {raw_variant!r} (expected one of {names})") from None
    intervals = _field(doc, "intervals", where)
    if not isinstance(intervals, list):
        raise InputError(f"{where}.intervals: expected a list")
    bounds = {}
    first_seen = {}
    for k, item in enumerate(intervals):
        at = f"{where}.intervals[{k}]"
        i = _int(_field(item, "i", at), f"{at}.i")
        j = _int(_field(item, "j", at), f"{at}.j")
        if not (1 <= i <= n and 1 <= j <= n) or i == j:
            raise InputError(f"{at}: pair {{{i},{j}}} is not a 2-subset of 1..{n}")
        p = (min(i, j), max(i, j))
        if p in first_seen:
            raise InputError(f"{at}: duplicate pair {{{p[0]},{p[1]}}} (already given at intervals[{first_seen[p]}])")
        first_seen[p] = k
        lo = _rational(_field(item, "lo", at), f"{at}.lo")
        hi = _rational(_field(item, "hi", at), f"{at}.hi")
        if lo > hi:
            raise InputError(f"{at}: lo {fmt(lo)} exceeds hi {fmt(hi)}")
        if variant.is_open and lo == hi:
            raise InputError(f"{at}: open interval ({fmt(lo)}, {fmt(hi)}) is empty under {variant.value}")
        if variant.positive and lo <= 0:
            raise InputError(f"{at}.lo: {variant.value} needs positive bounds, got {fmt(lo)}")
        bounds[p] = (lo, hi)
    missing = [p for p in all_pairs(n) if p not in bounds]
    if missing:
        listed = ", ".join(f"{{{i},{j}}}" for i, j in missing[:5])
        raise InputError(f"{where}.intervals: no interval for pair(s) {listed}")
    try:
        return IntervalFamily(n, bounds, variant)
    except RealizationError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_witness(doc: Any, where: str = "witness"):
    if isinstance(doc, dict) and "witness" in doc and "kind" not in doc:
        doc, where = doc["witness"], f"{where}.witness"
    kind = _field(doc, "kind", where)
    if kind not in ("tree", "graph"):
        raise InputError(f"{where}.kind: expected 'tree' or 'graph', got {kind!r}")
    count = _int(_field(doc, "vertex_count", where), f"{where}.vertex_count")
    labels = _field(doc, "labels", where)
    if not isinstance(labels, list):
        raise InputError(f"{where}.labels: expected a list of vertices")
    labels = [_int(v, f"{where}.labels[{k}]") for k, v in enumerate(labels)]
    raw_edges = _field(doc, "edges", where)
    if not isinstance(raw_edges, list):
        raise InputError(f"{where}.edges: expected a list")
    edges = []
    for k, e in enumerate(raw_edges):
        at = f"{where}.edges[{k}]"
        edges.append((
            _int(_field(e, "u", at), f"{at}.u"),
            _int(_field(e, "v", at), f"{at}.v"),
            _rational(_field(e, "weight", at), f"{at}.weight"),
        ))
    try:
        if kind == "tree":
            return WeightedTree(count, tuple(edges), tuple(labels))
        return WeightedGraph(count, tuple(edges), tuple(labels))
    except RealizationError as exc:
        raise InputError(f"{where}: {exc}") from None


# --- writing ---------------------------------------------------------------

def _var_name(v) -> str:
    if isinstance(v, tuple) and len(v) == 2 and v[0] == "y":
        return f"y{v[1]}"
    if isinstance(v, tuple) and len(v) == 2:
        return f"x{v[0]},{v[1]}"
    return str(v)


def render_expr(expr: LinExpr) -> str:
    terms = []
    for v in sorted(expr.coeffs, key=lambda u: (type(u).__name__, u)):
        c = expr.coeffs[v]
        mag = "" if abs(c) == 1 else f"{fmt(abs(c))}*"
        terms.append(("- " if c < 0 else "+ ") + mag + _var_name(v))
    if expr.const or not terms:
        terms.append(("- " if expr.const < 0 else "+ ") + fmt(abs(expr.const)))
    text = " ".join(terms)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def render_constraint(c: Constraint) -> str:
    return f"{render_expr(c.expr)} {c.sense} 0"


def witness_doc(witness) -> Dict:
    kind = "tree" if isinstance(witness, WeightedTree) else "graph"
    labels = witness.leaves if kind == "tree" else witness.labels
    edges = sorted((min(u, v), max(u, v), w) for u, v, w in witness.edges)
    return {
        "kind": kind,
        "vertex_count": witness.vertex_count,
        "labels": list(labels),
        "edges": [{"u": u, "v": v, "weight": fmt(w)} for u, v, w in edges],
    }


def verification_doc(report: Verification) -> Dict:
    return {
        "ok": report.ok,
        "pairs": [
            {"i": r.pair[0], "j": r.pair[1], "value": fmt(r.value), "lo": fmt(r.lo), "hi": fmt(r.hi), "ok": r.ok}
            for r in report.pairs
        ],
        "issues": list(report.issues),
    }


def certificate_doc(cert: Certificate, rows: Sequence[Constraint]) -> Dict:
    return {
        "residual": fmt(cert.residual),
        "valid": cert.validate(rows),
        "multipliers": [
            {"row": idx, "label": rows[idx].label, "multiplier": fmt(m), "constraint": render_constraint(rows[idx])}
            for idx, m in cert.multipliers
        ],
    }


def _splits(system: SplitSystem) -> List[str]:
    return [str(s) for s in system]


def decide_family(family: IntervalFamily, strategy: str = "topology"):
    if family.variant is Variant.GRAPH_CLOSED:
        return decide_graph(family)
    if family.variant is Variant.STAR_OPEN:
        return decide_star(family)
    return decide_tree(family, strategy)


def result_doc(family: IntervalFamily, decision, strategy: str, emit_certificate: bool) -> Dict:
    doc: Dict[str, Any] = {"n": family.n, "variant": family.variant.value}
    if family.variant.is_tree and family.variant is not Variant.STAR_OPEN:
        doc["strategy"] = strategy
    doc["feasible"] = decision.feasible
    if isinstance(decision, GraphInfeasible):
        i, j = decision.pair
        doc["violation"] = {
            "i": i,
            "j": j,
            "chain": list(decision.chain),
            "lo": fmt(family.lo(i, j)),
            "chain_sum": fmt(chain_sum(family, i, j, decision.chain)),
            "slack": fmt(decision.slack),
            "valid": certificate_holds(family, decision),
        }
        return doc
    if isinstance(decision, TreeInfeasible):
        out = []
        for r in decision.rejections:
            entry: Dict[str, Any] = {"candidate": r.candidate, "split_system": _splits(r.system)}
            if emit_certificate:
                entry["certificate"] = certificate_doc(r.certificate, r.constraints)
            else:
                entry["residual"] = fmt(r.certificate.residual)
            out.append(entry)
        doc["rejections"] = out
        return doc
    witness = decision.witness
    if isinstance(witness, WeightedTree):
        dist = tree_two_weights(witness)
        report = verify_tree(witness, family)
        doc["candidate"] = decision.candidate
        doc["split_system"] = _splits(decision.system)
    else:
        dist = graph_two_weights(witness)
        report = verify_graph(witness, family)
    doc["witness"] = witness_doc(witness)
    doc["distances"] = [{"i": i, "j": j, "value": fmt(v)} for (i, j), v in dist.items()]
    doc["verification"] = verification_doc(report)
    return doc


def dumps(doc: Dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _emit(doc: Dict, output: Optional[str]) -> None:
    text = dumps(doc)
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands --------------------------------------------------------------

def _read(parse, path: str):
    doc = _load_json(path)
    try:
        return parse(doc)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_decide(args) -> int:
    family = _read(parse_instance, args.input)
    decision = decide_family(family, args.strategy)
    _emit(result_doc(family, decision, args.strategy, args.emit_certificate), args.output)
    return EXIT_OK if decision.feasible else EXIT_NO


def cmd_verify(args) -> int:
    family = _read(parse_instance, args.input)
    witness = _read(parse_witness, args.witness)
    if isinstance(witness, WeightedTree):
        if family.variant is Variant.GRAPH_CLOSED:
            report = verify_graph(witness.as_graph(), family)
        else:
            report = verify_tree(witness, family)
    else:
        if family.variant is not Variant.GRAPH_CLOSED:
            raise InputError(f"{args.witness}: a graph witness cannot realize a {family.variant.value} instance")
        try:
            report = verify_graph(witness, family)
        except RealizationError as exc:
            raise InputError(f"{args.witness}: {exc}") from None
    _emit(verification_doc(report), args.output)
    return EXIT_OK if report.ok else EXIT_NO


def crosscheck(n: int, variant: Variant, seeds: int, strategy: str = "topology", start: int = 0) -> Dict:
    """Decide vs. brute force on ``mixed_instance(n, variant, seed)`` for each seed."""
    agree = feasible = 0
    disagree, bad_witness, bad_certificate = [], [], []
    for seed in range(start, start + seeds):
        family = mixed_instance(n, variant, seed)
        decision = decide_family(family, strategy)
        if variant is Variant.GRAPH_CLOSED:
            truth = brute_force_graph_decide(family)
        else:
            truth = brute_force_tree_decide(family)
        if decision.feasible == truth.feasible:
            agree += 1
        else:
            disagree.append(seed)
        if decision.feasible:
            feasible += 1
            w = decision.witness
            ok = verify_graph(w, family) if variant is Variant.GRAPH_CLOSED else verify_tree(w, family)
            if not ok:
                bad_witness.append(seed)
        elif isinstance(decision, GraphInfeasible):
            if not certificate_holds(family, decision):
                bad_certificate.append(seed)
        elif not all(r.certificate.validate(r.constraints) for r in decision.rejections):
            bad_certificate.append(seed)
    return {
        "n": n,
        "variant": variant.value,
        "strategy": strategy,
        "seeds": [start, start + seeds - 1] if seeds else [],
        "instances": seeds,
        "agree": agree,
        "feasible": feasible,
        "disagreeing_seeds": disagree,
        "unverified_witness_seeds": bad_witness,
        "invalid_certificate_seeds": bad_certificate,
        "ok": not (disagree or bad_witness or bad_certificate),
    }


def cmd_crosscheck(args) -> int:
    try:
        variant = Variant(args.variant)
    except ValueError:
        raise InputError(f"--variant: unknown variant {args.variant!r}") from None
    if args.n < 2:
        raise InputError(f"--n: need at least 2 points, got {args.n}")
    if args.n > MAX_ORACLE_N:
        raise InputError(f"--n: the brute-force oracle stops at n = {MAX_ORACLE_N}, got {args.n}")
    if args.seeds < 0:
        raise InputError("--seeds: must be nonnegative")
    report = crosscheck(args.n, variant, args.seeds, args.strategy, args.start)
    _emit(report, args.output)
    return EXIT_OK if report["ok"] else EXIT_NO


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rangereal", description="Decide realizability of distance intervals by graphs and trees.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decide", help="decide one instance file")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--strategy", choices=("topology", "raw"), default="topology")
    p.add_argument("--emit-certificate", action="store_true",
                   help="write full multiplier lists for rejected candidates")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("verify", help="check a witness against an instance")
    p.add_argument("--witness", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("crosscheck", help="compare the decider with the brute-force oracle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", required=True)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--start", type=int, default=0, help="first seed")
    p.add_argument("--strategy", choices=("topology", "raw"), default="topology")
    p.add_argument("--output")
    p.set_defaults(func=cmd_crosscheck)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
