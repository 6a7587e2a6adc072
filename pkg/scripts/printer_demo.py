#!/usr/bin/env python3
"""End-to-end walkthrough on the printer example.

A printer must eventually print both shapes infinitely often; its controller
only ever emits one shape per step.  The repair machine may pad an emitted
shape with the other one at cost 3.  The demo builds the synchronized
product, computes repair thresholds for the Mean and Sup aggregators,
cross-checks them against the brute-force oracle, extracts an
epsilon-optimal strategy, and optionally dumps Graphviz files.
"""

import argparse
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from omegarepair import (Aggregator, AggregatorKind, Lasso,
                         brute_repair_threshold, eval_aggregator,
                         lasso_membership, parse_model, repair_strategy,
                         repair_threshold)
from omegarepair.dot import arena_dot, product_dot
from omegarepair.product import build_arena, build_product

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return parse_model((FIXTURES / name).read_text(encoding="utf-8"))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dot-dir", type=Path, default=None,
                        help="write product.dot and arena.dot here")
    args = parser.parse_args()

    k = load("printer_kripke.txt")
    t = load("printer_rm.txt")
    b = load("printer_spec.txt")

    print("== fixed rewriting strategies ==")
    pad_every = Lasso((0,), (3,))
    pad_third = Lasso((0,), (0, 0, 3))
    mean = Aggregator(AggregatorKind.MEAN)
    print(f"pad every shape:      mean cost {eval_aggregator(mean, pad_every)}")
    print(f"pad every third step: mean cost {eval_aggregator(mean, pad_third)}")
    out_word = Lasso(("bt",), ("sq", "sq", "sq", "tr"))
    print(f"padded output satisfies the spec: "
          f"{lasso_membership(b, out_word)}")

    print("== synchronized product ==")
    g = build_product(k, t, b)
    arena = build_arena(g)
    print(f"product: {len(g.vertices)} vertices, {len(g.edges)} edges")
    print(f"arena:   {len(arena.vertices)} vertices, {len(arena.edges)} edges")

    print("== optimal thresholds ==")
    mean_res = repair_threshold(k, t, b)
    print(f"MEAN  {mean_res}   (oracle {brute_repair_threshold(k, t, b)})")
    sup_rm = replace(t, aggregator=Aggregator(AggregatorKind.SUP))
    sup_res = repair_threshold(k, sup_rm, b)
    print(f"SUP   {sup_res}   (oracle {brute_repair_threshold(k, sup_rm, b)})")

    print("== epsilon-optimal Mean strategy (eps = 1/4) ==")
    strat = repair_strategy(k, t, b, Fraction(1, 4))
    print(strat.serialize(), end="")

    if args.dot_dir:
        args.dot_dir.mkdir(parents=True, exist_ok=True)
        (args.dot_dir / "product.dot").write_text(product_dot(g))
        (args.dot_dir / "arena.dot").write_text(arena_dot(arena))
        print(f"wrote {args.dot_dir}/product.dot and arena.dot")


if __name__ == "__main__":
    main()
