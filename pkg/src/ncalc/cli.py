"""Command-line entry point.

    ncalc <command> --config <file> [--out <dir>] [--fixtures record|compare] [--force]

Exit codes: 0 when every check passes, 1 when a check fails or fixtures
drift, 2 for input errors.  NCALC_OUT overrides the default output directory.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import fixtures
from .errors import ConsistencyError, DomainError, InputError, RangeError, ResourceError
from .report import atomic_write
from .runner import COMMANDS, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SCENARIO_DIR = Path(__file__).parent / "scenarios"


def bundled_scenarios() -> list:
    return sorted(p.stem for p in SCENARIO_DIR.glob("*.json"))


def _parser():
    p = argparse.ArgumentParser(prog="ncalc", description="Non-commutative stochastic calculus workbench")
    p.add_argument("command", choices=COMMANDS + ("list",))
    p.add_argument("--config", help="scenario JSON file, or the name of a bundled scenario")
    p.add_argument("--out", help="output directory (default: $NCALC_OUT or ./ncalc-out/<scenario>)")
    p.add_argument("--fixtures", choices=("record", "compare"), help="record or compare golden fixtures")
    p.add_argument("--fixture-dir", help="fixture directory (default: scenarios/fixtures/<scenario>)")
    p.add_argument("--force", action="store_true", help="allow overwriting recorded fixtures")
    return p


def _resolve_config(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    bundled = SCENARIO_DIR / f"{arg}.json"
    if bundled.exists():
        return bundled
    raise InputError(f"config file {arg} does not exist")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_scenarios()))
        return EXIT_PASS
    try:
        if not args.config:
            raise InputError("--config is required")
        path = _resolve_config(args.config)
        try:
            config = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
        name = config.get("name", path.stem) if isinstance(config, dict) else path.stem
        out = Path(args.out or os.environ.get("NCALC_OUT") or Path("ncalc-out")) / name
        out.mkdir(parents=True, exist_ok=True)
        try:
            report = run_scenario(args.command, config, path.parent, out, name)
        except ConsistencyError as exc:
            print(f"consistency failure: {exc}", file=sys.stderr)
            return EXIT_FAIL
        fixture_dir = Path(args.fixture_dir) if args.fixture_dir else path.parent / "fixtures" / name
        drift = []
        if args.fixtures == "record":
            fixtures.record(out, fixture_dir, report.outputs, force=args.force)
        elif args.fixtures == "compare":
            drift = fixtures.compare(out, fixture_dir)
            for line in drift:
                report.fail("fixture drift", line)
        atomic_write(out / "report.json", report.to_json())
        atomic_write(out / "report.txt", report.to_text())
        sys.stdout.write(report.to_text())
        return EXIT_PASS if report.passed else EXIT_FAIL
    except (InputError, DomainError, RangeError, ResourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
