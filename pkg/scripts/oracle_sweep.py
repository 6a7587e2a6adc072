#!/usr/bin/env python3
"""Run the solver/oracle agreement sweep over a range of seeded instances.

Each seed produces one small random Kripke structure, repair machine, and
specification automaton; for every aggregator the game solvers' repair and
impair thresholds are compared against brute-force oracles.  Any MISMATCH
line is a bug in one of the two sides.
"""

import argparse
import sys

from omegarepair import OracleBudget, oracle_report


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--start", type=int, default=0,
                        help="first seed (default 0)")
    parser.add_argument("--count", type=int, default=50,
                        help="number of seeds (default 50)")
    parser.add_argument("--budget", type=int, default=None,
                        help="cap on enumerated adversary strategies")
    args = parser.parse_args()

    budget = OracleBudget(max_strategies=args.budget) if args.budget \
        else OracleBudget()
    mismatches = 0
    for seed in range(args.start, args.start + args.count):
        for line in oracle_report(seed, budget):
            print(line)
            if line.endswith("MISMATCH"):
                mismatches += 1
    print(f"SWEEP {args.count} seeds, {mismatches} mismatches")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
