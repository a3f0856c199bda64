"""Compare the two candidate enumerations: same systems, different cost.

    python3 scripts/raw_vs_topology.py --max-n 6
"""
import argparse
import time

from rangereal.splits import enumerate_candidate_systems


def timed(n, strategy):
    start = time.perf_counter()
    systems = frozenset(enumerate_candidate_systems(n, strategy))
    return systems, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args()
    same = True
    print(" n  systems   topology s      raw s  equal")
    for n in range(4, args.max_n + 1):
        topo, t_topo = timed(n, "topology")
        raw, t_raw = timed(n, "raw")
        same &= topo == raw
        print(f"{n:2d}  {len(topo):7d}  {t_topo:10.3f} {t_raw:10.3f}  {topo == raw}")
    raise SystemExit(0 if same else 1)


if __name__ == "__main__":
    main()
