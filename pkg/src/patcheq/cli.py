"""Command-line interface: summarize, check, impact, corpus.

Global options may also come from environment variables with the PATCHEQ_
prefix (PATCHEQ_SOLVER_CMD, PATCHEQ_QUERY_TIMEOUT_MS, PATCHEQ_BUDGET_MS,
PATCHEQ_ALGORITHM, PATCHEQ_DEPTH_LIMIT, PATCHEQ_FORMAT, PATCHEQ_JOBS,
PATCHEQ_STABLE).  Exit status: 0 success, 1 expectation or analysis failure,
2 infrastructure error.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .classifier import Verdict, eq_check
from .formula import serialize
from .minilang import MiniLangError
from .oracle import SolverConfig, SolverConfigError, default_solver_command
from .report import (
    ALL_METHODS, AnalysisError, ImpactReport, ManifestError, analyze_pair,
    check_expectations, fraction_decimal, load_case, load_function,
)
from .summarizer import summarize

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INFRA = 2


def _env(name: str, default):
    return os.environ.get(f"PATCHEQ_{name}", default)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--solver-cmd", default=_env("SOLVER_CMD", None),
                        help="solver command line (default: z3 -in if present, else bundled)")
    common.add_argument("--query-timeout-ms", type=int,
                        default=int(_env("QUERY_TIMEOUT_MS", 10_000)))
    common.add_argument("--budget-ms", type=int, default=int(_env("BUDGET_MS", 120_000)))
    common.add_argument("--depth-limit", type=int,
                        default=_env("DEPTH_LIMIT", None),
                        help="range-search depth limit (default 8 single-var, 4 multi-var)")
    common.add_argument("--algorithm", choices=ALL_METHODS,
                        default=_env("ALGORITHM", None))
    common.add_argument("--format", choices=("json", "text"),
                        default=_env("FORMAT", "text"))
    common.add_argument("--jobs", type=int, default=int(_env("JOBS", 1)))
    common.add_argument("--stable", action="store_true",
                        default=str(_env("STABLE", "")).lower() in ("1", "true"),
                        help="omit timing fields for byte-identical reports")
    common.add_argument("--unroll-limit", type=int, default=None)
    common.add_argument("--percent-places", type=int,
                        default=int(_env("PERCENT_PLACES", 2)),
                        help="decimal places for rendered percentages")

    parser = argparse.ArgumentParser(
        prog="patcheq",
        description="Quantitative patch impact analysis for numeric programs.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("summarize", parents=[common],
                           help="print a function's symbolic summary")
    p_sum.add_argument("file")

    p_check = sub.add_parser("check", parents=[common],
                             help="classify a pair: equivalent / total / partial")
    p_check.add_argument("original")
    p_check.add_argument("patched")

    p_impact = sub.add_parser("impact", parents=[common],
                              help="quantify the patch impact surface of a pair")
    p_impact.add_argument("original")
    p_impact.add_argument("patched")

    p_corpus = sub.add_parser("corpus", parents=[common],
                              help="run every .case manifest in a directory")
    p_corpus.add_argument("directory")
    return parser


def make_config(args) -> SolverConfig:
    if args.solver_cmd:
        cmd = tuple(shlex.split(args.solver_cmd))
    else:
        cmd = default_solver_command()
    return SolverConfig(
        solver_cmd=cmd,
        query_timeout_ms=args.query_timeout_ms,
        budget_ms=args.budget_ms,
    )


def cmd_summarize(args, cfg) -> int:
    fn = load_function(args.file)
    summary = summarize(fn, **({} if args.unroll_limit is None else {"unroll_limit": args.unroll_limit}))
    if args.format == "json":
        print(json.dumps({
            "function": fn.name,
            "path_count": summary.path_count,
            "inputs": [v.name for v in summary.inputs],
            "output": summary.output.name,
            "smtlib": serialize(summary.decls, summary.formula),
        }, indent=2, sort_keys=True))
    else:
        print(f"function {fn.name}: {summary.path_count} path(s)")
        print(serialize(summary.decls, summary.formula), end="")
    return EXIT_OK


def cmd_check(args, cfg) -> int:
    f1, f2 = load_function(args.original), load_function(args.patched)
    kwargs = {} if args.unroll_limit is None else {"unroll_limit": args.unroll_limit}
    result = eq_check(summarize(f1, **kwargs), summarize(f2, **kwargs), cfg)
    if args.format == "json":
        print(json.dumps({
            "verdict": result.kind.value,
            "witness": result.witness,
            "solver_calls": result.solver_calls,
        }, indent=2, sort_keys=True))
    else:
        print(f"verdict: {result.kind.value}")
        if result.witness:
            print(f"diverging input: {result.witness}")
    if result.kind is Verdict.UNKNOWN:
        return EXIT_FAILED
    return EXIT_OK


def _render_text(report: ImpactReport, places: int = 2) -> str:
    lines = [
        f"pair:        {report.name}",
        f"verdict:     {report.verdict.value}",
        f"algorithm:   {report.method}",
        f"eq count:    {'=' if report.exact else '>='} {report.eq_lower_bound} of {report.domain_size}",
        f"eq percent:  {'=' if report.exact else '>='} {fraction_decimal(report.eq_percent, places)}",
        f"impact:      {'=' if report.exact else '<='} {fraction_decimal(report.impact_percent, places)}%",
        f"condition:   {report.to_json()['condition']['pretty']}",
        f"impact cond: {report.to_json()['impact_condition']['pretty']}",
        f"solver calls: {report.solver_calls}",
    ]
    if report.witness:
        lines.insert(2, f"witness:     {report.witness}")
    if report.enum_case is not None:
        lines.append(f"enum case:   {report.enum_case.name.lower()}"
                     f" (eq models {len(report.eq_models or [])},"
                     f" neq models {len(report.neq_models or [])})")
    if report.incomplete:
        lines.append("incomplete:  budget or timeout cut the analysis short")
    return "\n".join(lines)


def cmd_impact(args, cfg) -> int:
    method = args.algorithm or "combined"
    report = analyze_pair(
        Path(args.original).stem, args.original, args.patched, method, cfg,
        depth_limit=int(args.depth_limit) if args.depth_limit is not None else None,
        unroll_limit=args.unroll_limit,
    )
    if args.format == "json":
        print(json.dumps(report.to_json(stable=args.stable, places=args.percent_places),
                         indent=2, sort_keys=True))
    else:
        print(_render_text(report, args.percent_places))
    return EXIT_OK if report.verdict is not Verdict.UNKNOWN else EXIT_FAILED


def cmd_corpus(args, cfg) -> int:
    directory = Path(args.directory)
    manifests = sorted(directory.rglob("*.case"))
    cases = [load_case(m) for m in manifests]
    results: list[tuple] = [None] * len(cases)

    def run_one(index: int):
        case = cases[index]
        method = args.algorithm or case.method
        depth = int(args.depth_limit) if args.depth_limit is not None else case.depth_limit
        try:
            report = analyze_pair(case.name, case.original, case.patched, method,
                                  cfg, depth_limit=depth, unroll_limit=args.unroll_limit)
            failures = check_expectations(case, report, bool(args.algorithm))
        except (AnalysisError, MiniLangError, SolverConfigError) as err:
            report = None
            failures = [f"error: {err}"]
        results[index] = (case, report, failures)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(run_one, range(len(cases))))
    else:
        for i in range(len(cases)):
            run_one(i)

    verdict_counts: dict[str, int] = {}
    impacts: list[Fraction] = []
    failed = 0
    rows = []
    for case, report, failures in results:
        if report is not None:
            verdict_counts[report.verdict.name] = verdict_counts.get(report.verdict.name, 0) + 1
            if report.verdict in (Verdict.P_EQ, Verdict.T_EQ, Verdict.T_NEQ):
                impacts.append(report.impact_percent)
        if failures:
            failed += 1
        rows.append((case, report, failures))

    mean_impact = sum(impacts, Fraction(0)) / len(impacts) if impacts else Fraction(0)
    if args.format == "json":
        print(json.dumps({
            "cases": [
                {
                    "name": case.name,
                    "ok": not failures,
                    "failures": failures,
                    "report": report.to_json(stable=args.stable, places=args.percent_places)
                    if report else None,
                }
                for case, report, failures in rows
            ],
            "aggregate": {
                "total": len(rows),
                "failed": failed,
                "verdicts": verdict_counts,
                "mean_impact_percent": fraction_decimal(mean_impact),
            },
        }, indent=2, sort_keys=True))
    else:
        name_w = max([len(c.name) for c, _, _ in rows] + [4])
        print(f"{'case'.ljust(name_w)}  {'verdict'.ljust(24)}  {'impact%':>10}  status")
        for case, report, failures in rows:
            verdict = report.verdict.value if report else "error"
            impact = fraction_decimal(report.impact_percent, args.percent_places) if report else "-"
            status = "ok" if not failures else "; ".join(failures)
            print(f"{case.name.ljust(name_w)}  {verdict.ljust(24)}  {impact:>10}  {status}")
        print(f"\n{len(rows)} case(s), {failed} failed; verdicts {verdict_counts}; "
              f"mean impact {fraction_decimal(mean_impact)}%")
    return EXIT_FAILED if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
    except SolverConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_INFRA
    handlers = {
        "summarize": cmd_summarize,
        "check": cmd_check,
        "impact": cmd_impact,
        "corpus": cmd_corpus,
    }
    try:
        return handlers[args.command](args, cfg)
    except (AnalysisError, ManifestError, MiniLangError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILED if isinstance(err, AnalysisError) else EXIT_INFRA
    except (SolverConfigError, FileNotFoundError) as err:
        print(f"infrastructure error: {err}", file=sys.stderr)
        return EXIT_INFRA


if __name__ == "__main__":
    sys.exit(main())
