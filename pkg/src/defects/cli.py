"""Command line entry point: ``defects run`` and ``defects list``.

Exit codes: 0 when every check passes, 1 when any check fails (the report
is still written), 2 for unreadable configs and unresolved references.
Reports go to ``$DEFECTS_REPORT_DIR`` (default ``./defects-reports``).
"""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from pathlib import Path

from .scenario import Report, ScenarioError, builtin_names, load_builtin, load_config, run_scenario

__all__ = ["main", "report_dir", "write_report"]

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def report_dir() -> Path:
    return Path(os.environ.get("DEFECTS_REPORT_DIR", "defects-reports"))


def _load(target: str):
    path = Path(target)
    if path.suffix == ".json" or path.is_file():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read config {target!r}: {exc}") from exc
        return load_config(text)
    return load_builtin(target)


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, list):
        return f"[{len(v)} values]"
    return f"{v:.3e}"


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


def write_report(report: Report, out: Path, with_csv: bool = False) -> list[Path]:
    """Write ``<name>.json`` and, optionally, one CSV per convergence series."""
    out.mkdir(parents=True, exist_ok=True)
    written = [out / f"{report.scenario}.json"]
    written[0].write_text(report.to_json(), encoding="utf-8")
    if with_csv:
        for check, rows in report.series.items():
            if not rows:
                continue
            path = out / f"{report.scenario}.{_slug(check)}.csv"
            with path.open("w", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, fieldnames=["check", *rows[0].keys()], lineterminator="\n")
                w.writeheader()
                for r in rows:
                    w.writerow({"check": check, **{k: repr(v) if isinstance(v, float) else v for k, v in r.items()}})
            written.append(path)
    return written


def _cmd_run(args) -> int:
    try:
        scenario = _load(args.target)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    def progress(row):
        if not args.quiet:
            err = row.rel_err if row.metric == "rel" else row.abs_err
            if row.metric == "upper":
                err = row.value
            mark = "PASS" if row.passed else "FAIL"
            print(f"{mark}  {row.check:<70s} err={_fmt(err)} tol={row.tolerance:.1e}", flush=True)

    try:
        report = run_scenario(scenario, progress)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    paths = write_report(report, report_dir(), args.csv)
    if not args.quiet:
        n_pass = sum(r.passed for r in report.rows)
        print(f"{scenario.name}: {n_pass}/{len(report.rows)} checks pass; report {paths[0]}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_list(args) -> int:
    for name in builtin_names(args.prefix):
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="defects", description="Verify defect currents on scenario configs.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a config file or a built-in scenario")
    r.add_argument("target", help="path to a JSON config or a built-in scenario name")
    r.add_argument("--csv", action="store_true", help="also write convergence tables as CSV")
    r.add_argument("--quiet", action="store_true", help="suppress the stdout table")
    r.set_defaults(func=_cmd_run)
    ls = sub.add_parser("list", help="list built-in scenarios")
    ls.add_argument("prefix", nargs="?", default="", help="only names starting with this prefix")
    ls.set_defaults(func=_cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
