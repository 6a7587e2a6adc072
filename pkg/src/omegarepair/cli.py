"""Command-line surface: eval, repair, impair, mask, product, oracle.

All output lines are machine-parseable KEY VALUE pairs; rationals are always
printed p/q.  Exit codes: 0 success, 1 usage, 2 parse error, 3 infeasible or
infinite (including refused constructions), 4 size limit, 5 oracle mismatch.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .core import Lasso, ModelError, eval_aggregator
from .dot import arena_dot, product_dot
from .formats import FormatError, format_rational, parse_model, parse_rational, \
    serialize_model
from .impair import ImpairError, impair_threshold, impair_witness
from .mask import MaskError, mask_synthesize
from .oracle import OracleBudget, oracle_report
from .product import build_arena, build_product
from .repair import RepairError, repair_strategy, repair_threshold

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_SIZE = 4
EXIT_MISMATCH = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _load(path, kinds):
    try:
        with open(path, encoding="utf-8") as fh:
            model = parse_model(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}")
    if not isinstance(model, kinds):
        names = "/".join(k.__name__ for k in kinds) if isinstance(kinds, tuple) \
            else kinds.__name__
        raise FormatError(f"{path}: expected a {names} model")
    return model


def _parse_costs(text: str) -> Lasso:
    prefix_s, _, cycle_s = text.partition("|")
    prefix = tuple(int(x) for x in prefix_s.split(",") if x.strip())
    cycle = tuple(int(x) for x in cycle_s.split(",") if x.strip())
    return Lasso(prefix, cycle)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise _UsageError(str(exc))


def _build_parser() -> _Parser:
    p = _Parser(prog="omegarepair")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval")
    pe.add_argument("--rm", required=True)
    pe.add_argument("--costs", required=True)

    pr = sub.add_parser("repair")
    pr.add_argument("--kripke", required=True)
    pr.add_argument("--rm", required=True)
    pr.add_argument("--spec", required=True)
    pr.add_argument("--epsilon")
    pr.add_argument("--strategy")
    pr.add_argument("--dot")

    pi = sub.add_parser("impair")
    pi.add_argument("--kripke", required=True)
    pi.add_argument("--rm", required=True)
    pi.add_argument("--bad", required=True)
    pi.add_argument("--epsilon")
    pi.add_argument("--witness")

    pm = sub.add_parser("mask")
    pm.add_argument("--kripke", required=True)
    pm.add_argument("--rm", required=True)
    pm.add_argument("--bad", required=True)
    pm.add_argument("--threshold", required=True)
    pm.add_argument("--epsilon")
    pm.add_argument("--depth", default="auto")
    pm.add_argument("-o", "--output", required=True)

    pp = sub.add_parser("product")
    pp.add_argument("--kripke", required=True)
    pp.add_argument("--rm", required=True)
    pp.add_argument("--spec", required=True)
    pp.add_argument("--dot", required=True)
    pp.add_argument("--arena", action="store_true")

    po = sub.add_parser("oracle")
    po.add_argument("--seed", type=int, required=True)
    po.add_argument("--count", type=int, default=1)
    po.add_argument("--budget", type=int, default=None,
                    help="adversary strategy budget")
    return p


def _cmd_eval(args, out):
    from .core import KripkeStructure, NBA, RepairMachine
    rm = _load(args.rm, RepairMachine)
    costs = _parse_costs(args.costs)
    value = eval_aggregator(rm.aggregator, costs)
    print(f"VALUE {format_rational(value)}", file=out)
    return EXIT_OK


def _cmd_repair(args, out):
    from .core import KripkeStructure, NBA, RepairMachine
    k = _load(args.kripke, KripkeStructure)
    t = _load(args.rm, RepairMachine)
    b = _load(args.spec, NBA)
    result = repair_threshold(k, t, b)
    print(result, file=out)
    print(f"GOOD {result.good_set}", file=out)
    print(f"BAD {result.bad_set}", file=out)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(product_dot(build_product(k, t, b)))
    if result.infinite:
        return EXIT_INFEASIBLE
    if args.strategy:
        eps = _rational(args.epsilon) if args.epsilon else None
        strat = repair_strategy(k, t, b, eps)
        with open(args.strategy, "w", encoding="utf-8") as fh:
            fh.write(strat.serialize())
        print(f"STRATEGY {args.strategy}", file=out)
    return EXIT_OK


def _cmd_impair(args, out):
    from .core import KripkeStructure, NBA, RepairMachine
    k = _load(args.kripke, KripkeStructure)
    t = _load(args.rm, RepairMachine)
    a = _load(args.bad, NBA)
    result = impair_threshold(k, t, a)
    print(result, file=out)
    print(f"GOOD {result.good_set}", file=out)
    print(f"BAD {result.bad_set}", file=out)
    if result.infinite:
        return EXIT_INFEASIBLE
    if args.witness:
        eps = _rational(args.epsilon) if args.epsilon else None
        wit = impair_witness(k, t, a, eps)
        with open(args.witness, "w", encoding="utf-8") as fh:
            fh.write(wit.serialize())
        print(f"WITNESS {args.witness}", file=out)
    return EXIT_OK


def _cmd_mask(args, out):
    from .core import KripkeStructure, NBA, RepairMachine
    k = _load(args.kripke, KripkeStructure)
    t = _load(args.rm, RepairMachine)
    bad = _load(args.bad, NBA)
    tau = _rational(args.threshold)
    eps = _rational(args.epsilon) if args.epsilon else None
    depth = args.depth if args.depth == "auto" else int(args.depth)
    mask = mask_synthesize(k, t, bad, tau, eps, depth)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(mask))
    print(f"MASK {args.output}", file=out)
    print(f"STATES {len(mask.states)}", file=out)
    return EXIT_OK


def _cmd_product(args, out):
    from .core import KripkeStructure, NBA, RepairMachine
    k = _load(args.kripke, KripkeStructure)
    t = _load(args.rm, RepairMachine)
    b = _load(args.spec, NBA)
    g = build_product(k, t, b)
    text = arena_dot(build_arena(g)) if args.arena else product_dot(g)
    with open(args.dot, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"DOT {args.dot}", file=out)
    print(f"VERTICES {len(g.vertices)}", file=out)
    print(f"EDGES {len(g.edges)}", file=out)
    return EXIT_OK


def _cmd_oracle(args, out):
    budget = OracleBudget(max_strategies=args.budget) if args.budget \
        else OracleBudget()
    mismatch = False
    for seed in range(args.seed, args.seed + args.count):
        for line in oracle_report(seed, budget):
            print(line, file=out)
            if line.endswith("MISMATCH"):
                mismatch = True
    return EXIT_MISMATCH if mismatch else EXIT_OK


def cli_main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "eval": _cmd_eval,
            "repair": _cmd_repair,
            "impair": _cmd_impair,
            "mask": _cmd_mask,
            "product": _cmd_product,
            "oracle": _cmd_oracle,
        }[args.command]
        return handler(args, out)
    except _UsageError as exc:
        print(f"ERROR USAGE {exc}", file=err)
        return EXIT_USAGE
    except (FormatError, ModelError) as exc:
        print(f"ERROR PARSE {exc}", file=err)
        return EXIT_PARSE
    except MaskError as exc:
        if exc.code == "SIZE_LIMIT":
            print(f"ERROR SIZE_LIMIT {exc}", file=err)
            return EXIT_SIZE
        print(f"ERROR {exc.code} {exc}", file=err)
        return EXIT_INFEASIBLE
    except (RepairError, ImpairError) as exc:
        print(f"ERROR {exc.code} {exc}", file=err)
        return EXIT_INFEASIBLE


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
