"""Command-line front end.

Exit codes: 0 success, 1 a false verdict from ``eval`` (or a failed
``verify-prop6``/``selftest``), 2 diagnostics or unusable input.
"""

from __future__ import annotations

import argparse
import sys

from .diagnostics import DiagnosticError
from .engine import BudgetExceeded, eval_datalog, eval_horn, eval_lfp
from .kprime import ORACLES, ExtensionParams, StructuralViolation, membership
from .parser import (
    format_horn, format_program, format_simlfp, format_structure, parse_horn, parse_lfp,
    parse_program, parse_structure,
)
from .pistar import UnsupportedLiteral, compile_program, compute_m, verify_compilation
from .selftest import DEFAULT_SEED, run_all
from .trees import (
    EncodingError, MalformedLength, NotAPerfectTree, NotSaturated, TreeStructure, check, decode,
    encode, sigma_structure,
)
from .translate import (
    GoalNotZeroAry, datalog_to_horn, datalog_to_simlfp, horn_to_datalog, lfp_to_datalog,
)

OK, FALSE, ERROR = 0, 1, 2

TRANSLATIONS = {
    ("horn", "datalogr"), ("datalogr", "horn"), ("lfp", "datalogr"), ("datalogr", "simlfp"),
}


class _Fail(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise _Fail(f"cannot read {path}: {err.strerror}") from None


def _parse(fn, path):
    text = _read(path)
    try:
        return fn(text)
    except DiagnosticError as err:
        raise _Fail("\n".join(f"{path}:{d}" for d in err.diagnostics)) from None


def _verdict(value: bool) -> int:
    print("true" if value else "false")
    return OK if value else FALSE


def cmd_eval(args) -> int:
    structure = _parse(parse_structure, args.structure)
    if args.logic == "datalogr":
        program = _parse(parse_program, args.input)
        goal = args.goal or program.goal
        if goal is None:
            raise _Fail("no goal given; use --goal or a 'goal' directive")
        res, trace = eval_datalog(program, structure, goal)
        if args.trace:
            sys.stdout.write(trace.dump())
            print(f"stages: {trace.stage_count}")
        holds = res.goal_holds
        if not isinstance(holds, bool):
            for t in holds.sorted():
                print("(" + ",".join(map(str, t)) + ")")
            holds = len(holds) > 0
        return _verdict(holds)
    if args.logic == "horn":
        return _verdict(eval_horn(_parse(parse_horn, args.input), structure))
    return _verdict(eval_lfp(_parse(parse_lfp, args.input), structure))


def cmd_translate(args) -> int:
    pair = (args.source, args.target)
    if pair not in TRANSLATIONS:
        raise _Fail(f"no translation from {args.source} to {args.target}")
    if args.source == "horn":
        program, _ = horn_to_datalog(_parse(parse_horn, args.input))
        sys.stdout.write(format_program(program))
    elif args.source == "lfp":
        program, _ = lfp_to_datalog(_parse(parse_lfp, args.input))
        sys.stdout.write(format_program(program))
    else:
        program = _parse(parse_program, args.input)
        if args.target == "horn":
            sys.stdout.write(format_horn(datalog_to_horn(program, args.goal)))
        else:
            sys.stdout.write(format_simlfp(datalog_to_simlfp(program, args.goal)))
    return OK


def _tree(path) -> TreeStructure:
    return TreeStructure.from_structure(_parse(parse_structure, path))


def cmd_encode(args) -> int:
    sys.stdout.write(format_structure(encode(_parse(parse_structure, args.structure)).to_structure()))
    return OK


def cmd_decode(args) -> int:
    sys.stdout.write(format_structure(decode(_tree(args.structure))))
    return OK


def cmd_sigma(args) -> int:
    if args.base:
        tree = encode(_parse(parse_structure, args.structure))
    else:
        tree = _tree(args.structure)
    sys.stdout.write(format_structure(sigma_structure(tree, args.m, args.method)))
    return OK


def cmd_pistar(args) -> int:
    program = _parse(parse_program, args.input)
    m = args.m if args.m is not None else compute_m(program)
    sys.stdout.write(format_program(compile_program(program, m)))
    return OK


def cmd_verify_compilation(args) -> int:
    program = _parse(parse_program, args.input)
    report = verify_compilation(_parse(parse_structure, args.structure), program, args.goal)
    sys.stdout.write(report.table())
    return OK if report.ok else FALSE


def cmd_check(args) -> int:
    try:
        accepted = check(tuple(args.entries))
    except MalformedLength as err:
        raise _Fail(str(err)) from None
    print("accept" if accepted else "reject")
    return OK


def cmd_kprime(args) -> int:
    g = _parse(parse_structure, args.structure)
    try:
        res = membership(g, ORACLES[args.oracle], ExtensionParams(args.c))
    except StructuralViolation as err:
        print(f"not a member: {err}")
        return OK
    if res.member:
        print(f"member (condition {res.condition}): h={res.h} levels={res.levels}: {res.reason}")
    else:
        print(f"not a member: h={res.h} levels={res.levels}: {res.reason}")
    return OK


def cmd_selftest(args) -> int:
    text, ok = run_all(args.seed)
    sys.stdout.write(text)
    return OK if ok else FALSE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hornfix", description="Fixed-point logics over finite structures.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a program, sentence or formula on a structure")
    p.add_argument("--logic", choices=("datalogr", "horn", "lfp"), default="datalogr")
    p.add_argument("--goal", help="goal relation (DATALOG^r only)")
    p.add_argument("--trace", action="store_true", help="dump every fixed-point stage")
    p.add_argument("input")
    p.add_argument("structure")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("translate", help="translate between the logics")
    p.add_argument("--from", dest="source", choices=("horn", "datalogr", "lfp"), required=True)
    p.add_argument("--to", dest="target", choices=("datalogr", "horn", "simlfp"), required=True)
    p.add_argument("--goal")
    p.add_argument("input")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("encode", help="lift a structure onto a perfect binary tree")
    p.add_argument("structure")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="read a saturated tree structure back")
    p.add_argument("structure")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sigma", help="the numeric structure of characteristic relations")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", choices=("enumerate", "decide"), default="enumerate")
    p.add_argument("--base", action="store_true", help="input is a plain structure; encode it first")
    p.add_argument("structure")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("pistar", help="compile a tree program to the level program")
    p.add_argument("--m", type=int)
    p.add_argument("input")
    p.set_defaults(func=cmd_pistar)

    p = sub.add_parser("verify-prop6", help="compare a tree program with its compilation")
    p.add_argument("--goal")
    p.add_argument("input")
    p.add_argument("structure", help="plain structure to encode")
    p.set_defaults(func=cmd_verify_compilation)

    p = sub.add_parser("check", help="is a tuple a characteristic tuple")
    p.add_argument("entries", type=int, nargs="*")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("kprime", help="membership in the substructure-closed class")
    p.add_argument("--oracle", choices=sorted(ORACLES), default="even")
    p.add_argument("--c", type=int, default=1)
    p.add_argument("structure")
    p.set_defaults(func=cmd_kprime)

    p = sub.add_parser("selftest", help="run the oracle suites")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as err:
        print(err, file=sys.stderr)
    except DiagnosticError as err:
        print(err, file=sys.stderr)
    except (BudgetExceeded, GoalNotZeroAry, UnsupportedLiteral, EncodingError, NotSaturated,
            NotAPerfectTree, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
