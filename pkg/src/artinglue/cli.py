"""Command-line entry point: ``artinglue check FILE``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ParseError
from .runner import DEFAULT_BUDGET, RunConfig, ScenarioReport, run_scenario
from .scenario import parse_scenario

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def emit_report(report: ScenarioReport, fmt: str = "text") -> str:
    if fmt == "structured":
        return json.dumps(report.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    lines = []
    for t in report.tasks:
        lines.append(f"[{t.status.upper():5}] {t.index}: {t.task} ({t.seconds:.2f}s)")
        for c in t.checks:
            mark = "ok  " if c["passed"] else "FAIL"
            line = f"    {mark} {c['law']} ({c['checked']} checked)"
            if "witness" in c:
                line += f" witness={c['witness']}"
            lines.append(line)
        for key in sorted(t.details):
            lines.append(f"    {key}: {t.details[key]}")
        if t.message:
            lines.append(f"    {t.message}")
    c = report.counts
    noun = "task" if c["tasks"] == 1 else "tasks"
    lines.append(f"{c['tasks']} {noun}: {c['pass']} passed, {c['fail']} failed, {c['error']} errors")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artinglue", description="Check Artin glueing constructions on finite presheaf toposes.")
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", help="run the tasks of a scenario file")
    check.add_argument("file", type=Path)
    check.add_argument("--probe-size", type=int, default=2, help="largest component size of default probe presheaves")
    check.add_argument("--format", choices=("text", "structured"), default="text")
    check.add_argument("--seed", type=int, default=0, help="seed for probe sampling beyond the budget")
    check.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max enumerated morphisms per probe set")
    check.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return parser


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        text = args.file.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    try:
        sc = parse_scenario(text)
    except ParseError as exc:
        print(f"{args.file}:{exc}  [{type(exc).__name__}]", file=sys.stderr)
        return EXIT_INVALID
    if args.probe_size < 0 or args.budget < 1:
        print("error: --probe-size must be >= 0 and --budget >= 1", file=sys.stderr)
        return EXIT_INVALID
    cfg = RunConfig(probe_size=args.probe_size, seed=args.seed, budget=args.budget)
    report = run_scenario(sc, cfg, source=args.file.name)
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
