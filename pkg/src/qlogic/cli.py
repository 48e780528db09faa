"""Command-line front end.

Examples::

    qlogic --model models/qubit.json eval "Z <= 0" --state ground
    qlogic --model models/bell.json jpd ZI IZ --state bell
    qlogic --model models/cnot.json measure cnot check --observable Z --state ground

Exit codes: 0 success, 1 proposition syntax error, 2 unknown observable,
state or process, 3 numerical failure, 4 invalid model file or invocation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Sequence

import numpy as np

from .errors import (
    ModelFileError,
    PropositionSyntaxError,
    QLogicError,
    UnknownObservable,
    UnknownState,
)
from .jointdist import com_probability, jpd
from .linalg import get_policy, using_policy
from .measurement import equivalence_suite, matrix_to_json, povm
from .modelfile import load_model
from .proplang import parse
from .projlattice import rank
from .truth import holds, probability, truth_value, well_formed

EXIT_SYNTAX = 1
EXIT_UNKNOWN = 2
EXIT_NUMERIC = 3
EXIT_INPUT = 4


class UnknownProcess(QLogicError, KeyError):
    def __str__(self):
        return f"unknown process {self.args[0]!r}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--model", default=d(None), help="path to the JSON model file")
    parser.add_argument("--state", default=d(None), help="state name from the model file")
    parser.add_argument("--tolerance", type=float, default=d(None),
                        help="operator-equality tolerance (overrides QLOGIC_TOLERANCE)")
    parser.add_argument("--output", choices=("json", "pretty"), default=d("json"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlogic", description="Projection-valued quantum logic engine")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_eval = sub.add_parser("eval", help="truth value and probability of a proposition")
    p_eval.add_argument("proposition")
    _global_options(p_eval, suppress=True)

    p_jpd = sub.add_parser("jpd", help="joint probability distribution of observables")
    p_jpd.add_argument("names", nargs="+")
    _global_options(p_jpd, suppress=True)

    p_meas = sub.add_parser("measure", help="POVM and measurement checks of a process")
    p_meas.add_argument("process")
    p_meas.add_argument("action", choices=("povm", "check"))
    p_meas.add_argument("--observable")
    _global_options(p_meas, suppress=True)
    return parser


def _cmd_eval(args, mf) -> dict:
    ast = parse(args.proposition)
    model = mf.model
    p = truth_value(ast, model)
    out = {"truth_projection": matrix_to_json(p), "rank": rank(p)}
    if args.state is not None:
        out["probability"] = probability(ast, model, args.state)
        out["holds"] = holds(ast, model, args.state)
        out["well_formed"] = well_formed(ast, model, args.state)
    return out


def _require_state(args, mf):
    if args.state is None:
        raise _UsageError("--state is required for this command")
    return mf.model.state(args.state)


def _cmd_jpd(args, mf) -> dict:
    rho = _require_state(args, mf)
    xs = [mf.model.observable(n) for n in args.names]
    p = com_probability(xs, rho)
    if p < 1 - get_policy().prob_clip:
        return {"exists": False, "com_probability": p}
    dist = jpd(xs, rho, names=args.names)
    return {"exists": True, "com_probability": p, **dist.to_json()}


def _cmd_measure(args, mf) -> dict:
    if args.process not in mf.processes:
        raise UnknownProcess(args.process)
    mp = mf.processes[args.process]
    if args.action == "povm":
        return povm(mp).to_json()
    if args.observable is None:
        raise _UsageError("measure ... check requires --observable")
    a = mf.model.observable(args.observable)
    rho = _require_state(args, mf)
    return equivalence_suite(mp, a, rho).to_json()


class _UsageError(Exception):
    pass


_COMMANDS = {"eval": _cmd_eval, "jpd": _cmd_jpd, "measure": _cmd_measure}


def _tolerance(args) -> float | None:
    if args.tolerance is not None:
        return args.tolerance
    env = os.environ.get("QLOGIC_TOLERANCE")
    if env:
        try:
            return float(env)
        except ValueError:
            raise _UsageError(f"QLOGIC_TOLERANCE is not a number: {env!r}") from None
    return None


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Execute one command; returns ``(exit_code, stdout_text)``."""
    args = build_parser().parse_args(argv)
    try:
        if args.model is None:
            raise _UsageError("--model is required")
        tol = _tolerance(args)
        policy = get_policy()
        if tol is not None:
            try:
                policy = replace(policy, op_eq=tol)
            except ValueError as exc:
                raise _UsageError(f"invalid tolerance: {exc}") from None
        with using_policy(policy):
            mf = load_model(args.model)
            result = _COMMANDS[args.command](args, mf)
    except PropositionSyntaxError as exc:
        return _fail(EXIT_SYNTAX, f"syntax error: {exc}")
    except (UnknownObservable, UnknownState, UnknownProcess) as exc:
        return _fail(EXIT_UNKNOWN, str(exc))
    except (ModelFileError, _UsageError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    except (QLogicError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERIC, f"numerical failure: {exc}")
    indent = 2 if args.output == "pretty" else None
    return 0, json.dumps(result, indent=indent) + "\n"


def _fail(code: int, message: str) -> tuple[int, str]:
    print(f"qlogic: {message}", file=sys.stderr)
    return code, ""


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
