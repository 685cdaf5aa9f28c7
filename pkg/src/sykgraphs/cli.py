"""Command-line front end.

Exit codes: 0 success, 1 verification or surgery failure, 2 enumeration
budget refusal, 3 parse errors (bad flags or unreadable input files).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import __version__
from .core import InvalidGraphError, degree, is_connected_g0
from .enumeration import (
    BudgetExceededError,
    classify_all,
    random_graph_rng,
    verify_theorem,
)
from .graphio import (
    GraphParseError,
    graph_to_dict,
    graph_to_dot,
    line_by_index,
    load_graph,
    save_graph,
)
from .melons import MelonError, is_melonic, star_glue
from .surgery import SurgeryError, analyze_cut, common_face_pairs, witness_audit

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_BUDGET = 2
EXIT_PARSE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; 2 is reserved for budget refusal
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


def _emit(payload: dict, output, fmt: str = "json"):
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unsupported format {fmt}")
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_payload(report) -> dict:
    payload = report.to_dict()
    payload["meta"]["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return payload


def _emit_report(report, args) -> None:
    if args.format == "csv":
        text = "\n".join(report.to_csv_rows()) + "\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(_report_payload(report), args.output)


def _add_enum_flags(sub):
    sub.add_argument("--q", type=int, required=True, help="strands per disorder line")
    sub.add_argument("--v", type=int, required=True, help="number of vertices (even)")
    sub.add_argument(
        "--budget",
        type=int,
        default=None,
        help="max raw structures to enumerate (default from SYKGRAPHS_BUDGET or 1e8)",
    )
    sub.add_argument("--workers", type=int, default=1, help="parallel worker count")
    sub.add_argument("--output", "-o", default=None, help="write the report here")
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sykgraphs", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("enumerate", help="histogram of (F, delta) at fixed (q, V)")
    _add_enum_flags(sub)

    sub = subs.add_parser(
        "verify", help="exhaustively check the degree bound and 2-cut characterization"
    )
    _add_enum_flags(sub)
    sub.add_argument(
        "--check-witness",
        action="store_true",
        help="also run the non-maximality surgery on every violating pair",
    )

    sub = subs.add_parser("classify", help="degree report and melonic verdict for one graph")
    sub.add_argument("--input", "-i", required=True)
    sub.add_argument("--output", "-o", default=None)

    sub = subs.add_parser("sample", help="seeded random graphs, summarized per delta")
    sub.add_argument("--q", type=int, required=True)
    sub.add_argument("--v", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("-n", "--samples", type=int, default=1000)
    sub.add_argument("--output", "-o", default=None)

    sub = subs.add_parser("reduce", help="greedy melon reduction certificate")
    sub.add_argument("--input", "-i", required=True)
    sub.add_argument("--output", "-o", default=None)

    sub = subs.add_parser("glue", help="cut one line in each graph and cross-join")
    sub.add_argument("--input1", required=True)
    sub.add_argument("--input2", required=True)
    sub.add_argument("--e1", type=int, default=0, help="line index in the first graph")
    sub.add_argument("--e2", type=int, default=0, help="line index in the second graph")
    sub.add_argument("--orientation", type=int, choices=(0, 1), default=0)
    sub.add_argument("--output", "-o", required=True)

    sub = subs.add_parser("witness", help="non-maximality surgery audit record")
    sub.add_argument("--input", "-i", required=True)
    sub.add_argument("--e1", type=int, default=None, help="line index of the first line")
    sub.add_argument("--e2", type=int, default=None, help="line index of the second line")
    sub.add_argument("--output", "-o", default=None)

    sub = subs.add_parser("export-dot", help="DOT rendering with stranded structure")
    sub.add_argument("--input", "-i", required=True)
    sub.add_argument("--output", "-o", default=None)

    return parser


def _cmd_enumerate(args) -> int:
    report = classify_all(
        args.q, args.v, budget=args.budget, workers=args.workers,
        check_corollary=False,
    )
    _emit_report(report, args)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = verify_theorem(
        args.q, args.v, budget=args.budget, workers=args.workers,
        check_witness=args.check_witness,
    )
    _emit_report(report, args)
    ok = report.theorem_ok and report.corollary_ok and report.witness_failures == 0
    return EXIT_OK if ok else EXIT_FAILURE


def _cmd_classify(args) -> int:
    graph = load_graph(args.input)
    rep = degree(graph)
    cert = is_melonic(graph)
    _emit(
        {
            "q": rep.q,
            "v": rep.V,
            "F": rep.F,
            "delta": rep.delta,
            "weight_exponent": rep.weight_exponent,
            "connected_g0": is_connected_g0(graph),
            "melonic": cert.melonic,
        },
        args.output,
    )
    return EXIT_OK


def _cmd_sample(args) -> int:
    rng = random.Random(args.seed)
    counts = {}
    max_delta = None
    for _ in range(args.samples):
        graph = random_graph_rng(args.q, args.v, rng)
        delta = degree(graph).delta
        counts[delta] = counts.get(delta, 0) + 1
        if max_delta is None or delta > max_delta:
            max_delta = delta
    _emit(
        {
            "q": args.q,
            "v": args.v,
            "seed": args.seed,
            "samples": args.samples,
            "counts_by_delta": [
                {"delta": d, "count": c} for d, c in sorted(counts.items())
            ],
            "max_delta": max_delta,
        },
        args.output,
    )
    return EXIT_OK


def _cmd_reduce(args) -> int:
    graph = load_graph(args.input)
    cert = is_melonic(graph)
    _emit(cert.to_dict(), args.output)
    return EXIT_OK


def _cmd_glue(args) -> int:
    g1 = load_graph(args.input1)
    g2 = load_graph(args.input2)
    glued = star_glue(
        g1, line_by_index(g1, args.e1), g2, line_by_index(g2, args.e2),
        args.orientation,
    )
    save_graph(glued, args.output)
    return EXIT_OK


def _cmd_witness(args) -> int:
    graph = load_graph(args.input)
    if (args.e1 is None) != (args.e2 is None):
        print("witness: give both --e1 and --e2, or neither", file=sys.stderr)
        return EXIT_PARSE
    if args.e1 is not None:
        pair = (line_by_index(graph, args.e1), line_by_index(graph, args.e2))
    else:
        pair = None
        for cand in common_face_pairs(graph):
            if not analyze_cut(graph, cand.e1, cand.e2).cut_in_g:
                pair = (cand.e1, cand.e2)
                break
        if pair is None:
            print(
                "witness: every common-face pair is a 2-cut; no surgery applies",
                file=sys.stderr,
            )
            return EXIT_FAILURE
    record = witness_audit(graph, pair)
    _emit(record.to_dict(), args.output)
    return EXIT_OK


def _cmd_export_dot(args) -> int:
    graph = load_graph(args.input)
    text = graph_to_dot(graph)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "verify": _cmd_verify,
    "classify": _cmd_classify,
    "sample": _cmd_sample,
    "reduce": _cmd_reduce,
    "glue": _cmd_glue,
    "witness": _cmd_witness,
    "export-dot": _cmd_export_dot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except BudgetExceededError as exc:
        print(f"sykgraphs: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (GraphParseError, InvalidGraphError) as exc:
        print(f"sykgraphs: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MelonError, SurgeryError, ValueError) as exc:
        print(f"sykgraphs: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
