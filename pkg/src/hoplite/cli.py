"""Command-line batch interface.

Exit codes: 0 success, 2 infeasible outcome (over-used resources, unmet
targets), 1 internal errors, 64 usage errors, 65 file parse errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .assess import (
    CohortResult,
    UtilizationReport,
    basic_assess_by_beds,
    basic_assess_by_theatre,
    utilization_of,
)
from .domain import DomainError, MssTemplate
from .fileio import ParseError, load_project, parse_alloc, parse_target, save_project
from .generator import InstanceScale, generate_instance
from .models import (
    AssessmentSpec,
    Norm,
    SolveFailure,
    TargetFitSpec,
    TargetingOption,
    Viewpoint,
    WardOptionPolicy,
    assess_capacity,
    best_fit_case_mix,
    check_feasibility,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64
EXIT_PARSE = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_mss_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--weeks", type=int, default=1)
    p.add_argument("--days", type=int, default=5, help="days per week")
    p.add_argument("--sessions-per-day", type=int, default=2)
    p.add_argument("--session-hours", type=float, default=4.0)


def _add_common_flags(p: argparse.ArgumentParser, project_required=True) -> None:
    p.add_argument("--project", required=project_required, help="path to a .project file")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--lenient", action="store_true",
                   help="tolerate trailing fields in input files")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hoplite", description="Hospital case-mix planning toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess-basic", parents=[], help="single-resource capacity estimate")
    _add_common_flags(p)
    _add_mss_flags(p)
    p.add_argument("--by", choices=("theatre", "beds"), default="theatre")

    p = sub.add_parser("assess-advanced", help="LP capacity assessment")
    _add_common_flags(p)
    _add_mss_flags(p)
    p.add_argument("--viewpoint", choices=("whole", "partition"), default="whole")
    p.add_argument("--ward-options", choices=("first", "all"), default="all")

    p = sub.add_parser("evaluate", help="utilization of an explicit allocation")
    _add_common_flags(p)
    _add_mss_flags(p)
    p.add_argument("--alloc", help="allocation file (defaults to the project's)")

    p = sub.add_parser("feasibility", help="can the targets/allocation be met?")
    _add_common_flags(p)
    _add_mss_flags(p)
    p.add_argument("--target", help="target file (defaults to the project's)")
    p.add_argument("--alloc", help="allocation file to check against the targets")

    p = sub.add_parser("best-fit", help="closest feasible cohort to the targets")
    _add_common_flags(p)
    _add_mss_flags(p)
    p.add_argument("--target", help="target file (defaults to the project's)")
    p.add_argument("--option", choices=("to1", "to2", "to3"), default="to1")
    p.add_argument("--norm", choices=("1", "2"), default="1")
    p.add_argument("--segments", type=int, default=16)
    p.add_argument("--maximize-throughput", action="store_true")

    p = sub.add_parser("validate", help="load and cross-check a project")
    _add_common_flags(p)

    p = sub.add_parser("generate", help="write a synthetic project")
    _add_common_flags(p, project_required=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--types", type=int, default=5)
    p.add_argument("--min-subs", type=int, default=1)
    p.add_argument("--max-subs", type=int, default=3)
    p.add_argument("--wards", type=int, default=5)
    p.add_argument("--theatres", type=int, default=10)
    p.add_argument("--out", required=True, help="directory to write the project into")
    return parser


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load_targets(args, bundle):
    if args.target:
        return parse_target(_read(args.target), file_name=args.target, lenient=args.lenient)
    return bundle.targets


def _mss_from(args, theatres: int) -> MssTemplate:
    return MssTemplate(
        weeks=args.weeks, daysPerWeek=args.days,
        sessionsPerDay=args.sessions_per_day,
        sessionHours=args.session_hours, theatres=theatres,
    )


def _report_rows(report: UtilizationReport) -> list[dict]:
    return report.to_json()


def _emit_report(report: UtilizationReport, fmt: str, header: list[str] | None = None):
    if fmt == "text":
        for line in header or []:
            print(line)
        print(report.to_text())
    elif fmt == "json":
        print(json.dumps({"header": header or [], "report": _report_rows(report)}, indent=2))
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["resource", "spaces", "usedHours", "availableHours",
                         "percentUsed", "patientsTreated", "flagged"])
        for r in report.rows:
            writer.writerow([r.name, r.spaces, f"{r.usedHours:.4f}",
                             f"{r.availableHours:.4f}", f"{r.percentUsed:.4f}",
                             f"{r.patientsTreated:.4f}", int(r.bottleneck)])


def _emit_cohort(result: CohortResult, fmt: str) -> None:
    header = [f"CAPACITY {result.total:.4f}", f"REVENUE {result.totalRevenue:.2f}"]
    header += [f"TYPE {g} COUNT {v:.4f}" for g, v in sorted(result.perType.items())]
    header += [f"WARNING {w}" for w in result.warnings]
    if fmt == "json":
        print(json.dumps(result.to_json(), indent=2))
    elif fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["typeId", "subTypeId", "count"])
        for (g, p), v in sorted(result.perSubType.items()):
            writer.writerow([g, p, f"{v:.4f}"])
    else:
        _emit_report(result.report, "text", header)


def _cmd_assess_basic(args) -> int:
    bundle = load_project(args.project, lenient=args.lenient)
    mss = _mss_from(args, bundle.config.theatres)
    if bundle.mix is None:
        raise DomainError("project has no mix file; a basic assessment needs one")
    if args.by == "theatre":
        if bundle.sessions is None:
            raise DomainError("theatre-based assessment needs a session assignment")
        result = basic_assess_by_theatre(bundle, bundle.sessions, bundle.mix, mss)
    else:
        result = basic_assess_by_beds(bundle, bundle.mix, mss)
    _emit_cohort(result, args.format)
    return EXIT_OK


def _cmd_assess_advanced(args) -> int:
    bundle = load_project(args.project, lenient=args.lenient)
    mss = _mss_from(args, bundle.config.theatres)
    spec = AssessmentSpec(
        viewpoint=Viewpoint.WHOLE_COHORT if args.viewpoint == "whole"
        else Viewpoint.SESSION_PARTITION,
        wardOptionPolicy=WardOptionPolicy.FIRST_ONLY if args.ward_options == "first"
        else WardOptionPolicy.ALL,
    )
    result = assess_capacity(bundle, spec, mss)
    _emit_cohort(result, args.format)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    bundle = load_project(args.project, lenient=args.lenient)
    mss = _mss_from(args, bundle.config.theatres)
    allocation = bundle.allocation
    if args.alloc:
        allocation = parse_alloc(
            _read(args.alloc), bundle.catalog, file_name=args.alloc, lenient=args.lenient
        )
    if allocation is None:
        raise DomainError("no allocation given: pass --alloc or add one to the project")
    report = utilization_of(bundle, allocation, mss)
    flagged = report.flagged()
    header = [f"FLAGGED {name}" for name in flagged] or ["ALL RESOURCES WITHIN CAPACITY"]
    _emit_report(report, args.format, header)
    return EXIT_INFEASIBLE if flagged else EXIT_OK


def _cmd_feasibility(args) -> int:
    bundle = load_project(args.project, lenient=args.lenient)
    mss = _mss_from(args, bundle.config.theatres)
    targets = _load_targets(args, bundle)
    allocation = None
    if args.alloc:
        allocation = parse_alloc(
            _read(args.alloc), bundle.catalog, file_name=args.alloc, lenient=args.lenient
        )
    verdict = check_feasibility(bundle, mss, targets=targets, allocation=allocation)
    if args.format == "json":
        print(json.dumps(verdict.to_json(), indent=2))
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["resource", "excessHours"])
        for name, v in verdict.violations.items():
            writer.writerow([name, f"{v:.4f}"])
    else:
        print("FEASIBLE" if verdict.feasible else "INFEASIBLE")
        for name, v in verdict.violations.items():
            print(f"EXCESS {name} {v:.4f}")
    return EXIT_OK if verdict.feasible else EXIT_INFEASIBLE


def _cmd_best_fit(args) -> int:
    bundle = load_project(args.project, lenient=args.lenient)
    mss = _mss_from(args, bundle.config.theatres)
    targets = _load_targets(args, bundle)
    if targets is None:
        raise DomainError("no targets given: pass --target or add one to the project")
    fit = TargetFitSpec(
        option=TargetingOption(args.option),
        norm=Norm.ONE if args.norm == "1" else Norm.TWO,
        pwlSegments=args.segments,
        postOptimizeThroughput=args.maximize_throughput,
    )
    result = best_fit_case_mix(bundle, mss, targets, fit)
    if args.format == "json":
        print(json.dumps(result.to_json(), indent=2))
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["target", "unmet"])
        for key, v in result.deviations.items():
            writer.writerow([key, f"{v:.4f}"])
    else:
        print(f"OBJECTIVE {result.objectiveValue:.4f}")
        print(f"UNMET TOTAL {result.totalUnmet():.4f}")
        for key, v in sorted(result.deviations.items()):
            print(f"UNMET {key} {v:.4f}")
        _emit_cohort(result.cohort, "text")
    return EXIT_OK if result.totalUnmet() <= 1e-6 else EXIT_INFEASIBLE


def _cmd_validate(args) -> int:
    bundle = load_project(args.project, lenient=args.lenient)
    print(
        f"OK: {len(bundle.catalog.types)} types, "
        f"{len(bundle.catalog.subTypes)} sub-types, "
        f"{len(bundle.config.wards)} wards"
    )
    return EXIT_OK


def _cmd_generate(args) -> int:
    scale = InstanceScale(
        types=args.types, subTypesPerType=(args.min_subs, args.max_subs),
        wards=args.wards, theatres=args.theatres,
    )
    bundle = generate_instance(args.seed, scale)
    path = save_project(bundle, args.out)
    print(f"WROTE {path}")
    return EXIT_OK


_COMMANDS = {
    "assess-basic": _cmd_assess_basic,
    "assess-advanced": _cmd_assess_advanced,
    "evaluate": _cmd_evaluate,
    "feasibility": _cmd_feasibility,
    "best-fit": _cmd_best_fit,
    "validate": _cmd_validate,
    "generate": _cmd_generate,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except (DomainError, SolveFailure, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    raise SystemExit(run())
