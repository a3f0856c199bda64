"""Sweep decide vs. brute force over every variant and small n.

    python3 scripts/crosscheck_sweep.py --seeds 50
"""
import argparse
import json
import time

from rangereal.cli import crosscheck
from rangereal.core import Variant

SIZES = {
    Variant.GRAPH_CLOSED: range(2, 7),
    Variant.TREE_GENERAL_OPEN: range(3, 6),
    Variant.TREE_GENERAL_CLOSED: range(3, 6),
    Variant.TREE_POSITIVE_OPEN: range(3, 6),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--strategy", choices=["topology", "raw"], default="topology")
    ap.add_argument("--json", action="store_true", help="print full reports as JSON lines")
    args = ap.parse_args()
    all_ok = True
    for variant, sizes in SIZES.items():
        for n in sizes:
            start = time.perf_counter()
            report = crosscheck(n, variant, args.seeds, args.strategy)
            elapsed = time.perf_counter() - start
            all_ok &= report["ok"]
            if args.json:
                print(json.dumps(report))
            else:
                print(f"{variant.value:22s} n={n}  agree {report['agree']}/{report['instances']}"
                      f"  feasible {report['feasible']:3d}  ok={report['ok']}  {elapsed:6.2f}s")
    raise SystemExit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
