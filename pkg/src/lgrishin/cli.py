"""Command-line front end.

Exit codes: 0 positive, 1 negative, 2 inconclusive (budget), 3 usage or
parse error.  Artifacts go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calculus import check
from .core import ParseError, PolarityError, parse_sequent
from .prover import BudgetExceeded, Budgets, Proved, prove, stats
from .reduction import DimacsError, parse_dimacs, reduce
from .serialize import DerivationFormatError, dumps, loads, to_latex, to_text
from .witness import WitnessError, brute_force_sat, build_witness, roundtrip

POSITIVE, NEGATIVE, INCONCLUSIVE, USAGE = 0, 1, 2, 3

_EMITTERS = {"json": lambda d: dumps(d) + "\n", "latex": to_latex, "text": to_text}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from None


def _sequent_arg(arg: str):
    text = _read(arg[1:]) if arg.startswith("@") else arg
    return parse_sequent(text.strip())


def _emit(d, fmt: str) -> None:
    sys.stdout.write(_EMITTERS[fmt](d))


def cmd_prove(args) -> int:
    goal = _sequent_arg(args.sequent)
    budgets = Budgets.for_goal(goal)
    budgets = Budgets(args.grishin if args.grishin is not None else budgets.grishin_max,
                      args.depth if args.depth is not None else budgets.depth_max,
                      budgets.node_max)
    outcome = prove(goal, budgets)
    if isinstance(outcome, Proved):
        _emit(outcome.derivation, args.emit)
        return POSITIVE
    if isinstance(outcome, BudgetExceeded):
        print(f"inconclusive: {outcome.which} budget exceeded", file=sys.stderr)
        return INCONCLUSIVE
    print("unprovable", file=sys.stderr)
    return NEGATIVE


def cmd_check(args) -> int:
    d = loads(_read(args.derivation))
    report = check(d, allow_cut=args.allow_cut)
    if report.ok:
        print(f"valid: logical {report.logical_count}, grishin {report.grishin_count}, "
              f"display {report.display_count}, cut {report.cut_count}")
        return POSITIVE
    path, msg = report.first_error
    print(f"invalid at node {list(path)}: {msg}", file=sys.stderr)
    return NEGATIVE


def cmd_reduce(args) -> int:
    seq = reduce(parse_dimacs(_read(args.cnf)))
    if args.output:
        Path(args.output).write_text(seq.text + "\n")
    else:
        print(seq.text)
    return POSITIVE


def _parse_assignment(text: str, m: int) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise _UsageError(f"bad assignment {text!r}") from None
    if len(values) != m or any(v not in (0, 1) for v in values):
        raise _UsageError(f"assignment needs {m} comma-separated values in {{0, 1}}")
    return values


def cmd_witness(args) -> int:
    cnf = parse_dimacs(_read(args.cnf))
    if args.assignment is None:
        values = brute_force_sat(cnf)
        if values is None:
            print("unsatisfiable: no witness exists", file=sys.stderr)
            return NEGATIVE
    else:
        values = _parse_assignment(args.assignment, cnf.num_vars)
        if not cnf.satisfied_by(values):
            print("assignment does not satisfy the formula", file=sys.stderr)
            return NEGATIVE
    _emit(build_witness(cnf, values), args.emit)
    return POSITIVE


def cmd_roundtrip(args) -> int:
    verdict = roundtrip(parse_dimacs(_read(args.cnf)))
    print(verdict.summary)
    if verdict.inconclusive:
        return INCONCLUSIVE
    return POSITIVE if verdict.consistent else NEGATIVE


def cmd_stats(args) -> int:
    st = stats(_sequent_arg(args.sequent))
    c = st.census
    print(f"formula connectives: {c.formula_total}")
    print(f"structural connectives: {c.structural_total}")
    print(f"input family: {c.input_family}")
    print(f"output family: {c.output_family}")
    print(f"length: {st.length}")
    print(f"grishin budget: {st.budgets.grishin_max}")
    print(f"depth budget: {st.budgets.depth_max}")
    return POSITIVE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lgrishin", description="Lambek-Grishin derivability toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prove", help="search for a Cut-free derivation")
    p.add_argument("sequent", help="sequent text, or @file")
    p.add_argument("--grishin", type=int, help="Grishin interaction budget")
    p.add_argument("--depth", type=int, help="derivation depth budget")
    p.add_argument("--emit", choices=sorted(_EMITTERS), default="text")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="validate a JSON derivation")
    p.add_argument("derivation")
    p.add_argument("--allow-cut", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="compile a DIMACS CNF into a sequent")
    p.add_argument("cnf")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("witness", help="derivation of the reduced sequent from an assignment")
    p.add_argument("cnf")
    p.add_argument("--assignment", help="comma-separated 0/1 values, e.g. 1,0")
    p.add_argument("--emit", choices=sorted(_EMITTERS), default="json")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("roundtrip", help="compare brute-force SAT with derivability")
    p.add_argument("cnf")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("stats", help="connective census and default budgets")
    p.add_argument("sequent", help="sequent text, or @file")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"lgrishin: {exc}", file=sys.stderr)
    except (ParseError, PolarityError, DimacsError, DerivationFormatError, WitnessError) as exc:
        print(f"lgrishin: {type(exc).__name__}: {exc}", file=sys.stderr)
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
