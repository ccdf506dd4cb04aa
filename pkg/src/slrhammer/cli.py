"""Command line entry point ``slr-hammer``.

Exit codes: 0 entailed or unsatisfiable, 1 not entailed or satisfiable,
3 usage error, 4 parse error, 5 unsupported fragment or resource limit.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .errors import HammerError
from .export import DATALOG_FORMATS, GROUND_FORMATS, export_ground, export_hammered
from .generator import MODES, InstanceSpec, generate_text
from .parser import parse_problem
from .pipeline import decide, decide_ground, ground_problem_abstraction, hammer_problem

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _print_stats(stats: dict, out) -> None:
    for key, value in stats.items():
        if isinstance(value, float):
            value = f"{value:.4f}s"
        print(f"  {key}: {value}", file=out)


def _print_round(stratum: int, iteration: int, new: int) -> None:
    print(f"stratum {stratum} iteration {iteration}: {new} new facts", file=sys.stderr)


def cmd_decide(args) -> int:
    problem = parse_problem(_read(args.file), allow_negative=True)
    trace = _print_round if args.trace else None
    verdict = decide(problem, route=args.route, prune=not args.no_prune, symmetry=args.symmetry,
                     stratified=args.stratified, elim_passes=args.elim_rounds, trace=trace)
    print(verdict.status)
    if verdict.model is not None and not args.quiet:
        print(verdict.model)
    if args.stats:
        print("statistics:")
        _print_stats(verdict.stats, sys.stdout)
    return verdict.exit_code


def cmd_hammer(args) -> int:
    problem = parse_problem(_read(args.file))
    _, _, result = hammer_problem(problem, prune=not args.no_prune, symmetry=args.symmetry,
                                  stratified=args.stratified)
    sys.stdout.write(export_hammered(result, args.out))
    return 0


def cmd_ground(args) -> int:
    problem = parse_problem(_read(args.file), allow_negative=True)
    _, _, psi = ground_problem_abstraction(problem, elim_passes=args.elim_rounds)
    sys.stdout.write(export_ground(psi, args.out))
    return 0


def cmd_oracle(args) -> int:
    problem = parse_problem(_read(args.file), allow_negative=True)
    verdict = decide_ground(problem, elim_passes=args.elim_rounds)
    print(verdict.status)
    if verdict.model is not None and not args.quiet:
        print(verdict.model)
    if args.stats:
        print("statistics:")
        _print_stats(verdict.stats, sys.stdout)
    return verdict.exit_code


def cmd_gen(args) -> int:
    spec = InstanceSpec(seed=args.seed, max_predicates=args.predicates, max_arity=args.arity,
                        max_clauses=args.clauses, max_vars=args.vars,
                        const_range=(args.const_min, args.const_max), horn=not args.non_horn, mode=args.mode)
    sys.stdout.write(generate_text(spec))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slr-hammer", description="Decide universal and existential conjectures over "
                "Horn clauses with simple linear rational bounds.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decide", help="decide the conjecture of a problem file")
    d.add_argument("file")
    d.add_argument("--stats", action="store_true", help="print sizes and timings")
    d.add_argument("--trace", action="store_true", help="log new facts per saturation round")
    d.add_argument("--quiet", action="store_true", help="omit the counter-model")
    d.add_argument("--route", choices=("auto", "datalog", "ground"), default="auto")
    d.add_argument("--symmetry", action="store_true", help="drop symmetric goal instances when sound")
    d.add_argument("--stratified", action="store_true", help="encode the goal with stratified negation")
    d.add_argument("--no-prune", action="store_true", help="keep goal instances that violate the guard")
    d.add_argument("--elim-rounds", type=int, default=0, metavar="N",
                   help="resolve away positively grounded predicates N times first (grounding route)")
    d.set_defaults(func=cmd_decide)

    h = sub.add_parser("hammer", help="print the hammered program")
    h.add_argument("file")
    h.add_argument("--out", choices=DATALOG_FORMATS, default="datalog")
    h.add_argument("--symmetry", action="store_true")
    h.add_argument("--stratified", action="store_true")
    h.add_argument("--no-prune", action="store_true")
    h.set_defaults(func=cmd_hammer)

    g = sub.add_parser("ground", help="print the ground abstraction")
    g.add_argument("file")
    g.add_argument("--out", choices=GROUND_FORMATS, default="clauses")
    g.add_argument("--elim-rounds", type=int, default=0, metavar="N")
    g.set_defaults(func=cmd_ground)

    o = sub.add_parser("oracle", help="decide by grounding and brute force")
    o.add_argument("file")
    o.add_argument("--stats", action="store_true")
    o.add_argument("--quiet", action="store_true")
    o.add_argument("--elim-rounds", type=int, default=0, metavar="N")
    o.set_defaults(func=cmd_oracle)

    n = sub.add_parser("gen", help="print a random problem")
    n.add_argument("--seed", type=int, required=True)
    n.add_argument("--predicates", type=int, default=4)
    n.add_argument("--arity", type=int, default=2)
    n.add_argument("--clauses", type=int, default=6)
    n.add_argument("--vars", type=int, default=2)
    n.add_argument("--const-min", type=int, default=-3)
    n.add_argument("--const-max", type=int, default=3)
    n.add_argument("--non-horn", action="store_true")
    n.add_argument("--mode", choices=MODES + ("any",), default="any")
    n.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"slr-hammer: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HammerError as exc:
        print(f"slr-hammer: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
