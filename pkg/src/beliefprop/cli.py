"""Command-line front end: validate, infer, dsep, cutset.

Exit codes: 0 success, 1 usage, 2 parse error, 3 validation error,
4 impossible evidence, 5 internal non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import conditioning, cutset, dsep, model, netformat, oracle, polytree
from .errors import ConvergenceError, ImpossibleEvidenceError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_IMPOSSIBLE = 4
EXIT_NO_CONVERGENCE = 5


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="beliefprop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network file")
    p.add_argument("file")

    p = sub.add_parser("infer", help="posterior beliefs given evidence")
    p.add_argument("file")
    p.add_argument("-e", "--evidence", action="append", default=[],
                   metavar="Var=state")
    p.add_argument("-q", "--query", action="append", default=[], metavar="Var")
    p.add_argument("--method", default="auto",
                   choices=["auto", "polytree", "conditioning", "exact"])
    p.add_argument("--trace", metavar="PATH", help="write message updates here")
    p.add_argument("--likelihood", action="store_true",
                   help="also print the evidence probability")

    p = sub.add_parser("dsep", help="d-separation query")
    p.add_argument("file")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--given", default="", metavar="A,B,...")

    p = sub.add_parser("cutset", help="find a loop cutset")
    p.add_argument("file")
    p.add_argument("--exhaustive", action="store_true",
                   help="smallest cutset by subset enumeration")
    return parser


def _load_network(path: str) -> model.Network:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _UsageError(str(exc)) from None
    net = netformat.parse(text)
    problems = model.validate(net)
    if problems:
        raise _ValidationFailure(problems)
    return net


class _ValidationFailure(Exception):
    def __init__(self, problems):
        super().__init__("validation failed")
        self.problems = problems


def _fmt_vec(vec) -> str:
    return ",".join(format(x, ".12g") for x in vec)


class _TraceWriter:
    def __init__(self, fh):
        self.fh = fh

    def __call__(self, assignment, rec: polytree.TraceRecord):
        prefix = ""
        if assignment:
            keys = " ".join(f"{k}={v}" for k, v in sorted(assignment.items()))
            prefix = f"run {keys} "
        self.fh.write(
            f"{prefix}sweep={rec.sweep} dir={rec.direction} "
            f"arc={rec.parent}->{rec.child} "
            f"old={_fmt_vec(rec.old)} new={_fmt_vec(rec.new)}\n"
        )


def _cmd_validate(args, out) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _UsageError(str(exc)) from None
    net = netformat.parse(text)
    problems = model.validate(net)
    if problems:
        for line in problems:
            print(line, file=out)
        return EXIT_VALIDATION
    print("ok", file=out)
    return EXIT_OK


def _belief_lines(net, beliefs, queries, out) -> None:
    for q in queries:
        states = net.variable(q).states
        pairs = " ".join(
            f"{label}={value:.6f}" for label, value in zip(states, beliefs[q])
        )
        print(f"BEL({q}) {pairs}", file=out)


def _cmd_infer(args, out) -> int:
    net = _load_network(args.file)
    try:
        evidence = netformat.parse_evidence(args.evidence, net)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    queries = args.query or [v for v in net.var_names() if v not in evidence]
    for q in queries:
        if q not in net.vars_by_name:
            raise _UsageError(f"unknown query variable {q!r}")

    trace_fh = open(args.trace, "w", encoding="utf-8") if args.trace else None
    on_update = _TraceWriter(trace_fh) if trace_fh else None
    try:
        likelihood = None
        if args.method == "exact":
            beliefs = {q: oracle.oracle_marginal(net, evidence, q) for q in queries}
            likelihood = oracle.oracle_evidence_probability(net, evidence)
        elif args.method == "polytree":
            if not net.is_singly_connected():
                raise _UsageError(
                    "--method polytree requires a singly connected network; "
                    "use auto or conditioning"
                )
            mixed = conditioning.auto_infer(net, evidence, queries, on_update=on_update)
            beliefs = mixed.beliefs
            likelihood = math.exp(mixed.log_likelihood)
        elif args.method == "conditioning":
            members = cutset.greedy_cutset(net)
            mixed, _ = conditioning.infer_conditioned(
                net, evidence, members, queries, on_update=on_update
            )
            beliefs = mixed.beliefs
            likelihood = math.exp(mixed.log_likelihood)
        else:
            mixed = conditioning.auto_infer(net, evidence, queries, on_update=on_update)
            beliefs = mixed.beliefs
            likelihood = math.exp(mixed.log_likelihood)
    finally:
        if trace_fh:
            trace_fh.close()

    _belief_lines(net, beliefs, queries, out)
    if args.likelihood:
        print(f"P(e) = {likelihood:.12g}", file=out)
    return EXIT_OK


def _cmd_dsep(args, out) -> int:
    net = _load_network(args.file)
    given = [g for g in args.given.split(",") if g]
    for name in [args.x, args.y, *given]:
        if name not in net.vars_by_name:
            raise _UsageError(f"unknown variable {name!r}")
    try:
        separated = dsep.d_separated(net, args.x, args.y, given)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    print("d-separated" if separated else "connected", file=out)
    for path in dsep.list_paths(net, args.x, args.y):
        blockers = dsep.blocking_nodes(net, path, given)
        label = f"blocked at {', '.join(blockers)}" if blockers else "open"
        print(f"path {'-'.join(path.nodes)}: {label}", file=out)
    return EXIT_OK


def _cmd_cutset(args, out) -> int:
    net = _load_network(args.file)
    if args.exhaustive:
        members = cutset.min_cutset_exhaustive(net)
    else:
        members = cutset.greedy_cutset(net)
    print(f"members: {' '.join(members) if members else '(none)'}", file=out)
    count = 1
    for m in members:
        count *= net.card(m)
    print(f"assignments: {count}", file=out)
    return EXIT_OK


def run(argv, out=None, err=None) -> int:
    """Execute one command line; returns the exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "validate": _cmd_validate,
            "infer": _cmd_infer,
            "dsep": _cmd_dsep,
            "cutset": _cmd_cutset,
        }[args.command]
        return handler(args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except netformat.ParseError as exc:
        print(f"parse error at {exc.span.line}:{exc.span.column}: {exc.message}",
              file=err)
        return EXIT_PARSE
    except _ValidationFailure as exc:
        for line in exc.problems:
            print(line, file=err)
        return EXIT_VALIDATION
    except ImpossibleEvidenceError as exc:
        print(f"impossible evidence: {exc}", file=err)
        return EXIT_IMPOSSIBLE
    except ConvergenceError as exc:
        print(f"internal error: {exc}", file=err)
        return EXIT_NO_CONVERGENCE


def main() -> None:
    sys.exit(run(sys.argv[1:]))
