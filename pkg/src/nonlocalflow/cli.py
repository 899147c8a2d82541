"""Command line interface: run, verify, and sweep.

Exit codes for `run`: 0 completed with no violations, 1 configuration
error, 2 completed but with check violations, 3 early termination.
`verify` exits 0 when every suite check passes and 2 otherwise.
`sweep` exits with the worst per-run code.  The environment variable
NONLOCAL_FLOW_OUTDIR, when set, becomes the root for relative output
directories.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import RunConfig, expand_sweep, load_run_config, load_toml, parse_run_config
from .diagnostics import CheckId
from .errors import ConfigError
from .evolution import simulate
from .initial_data import build_initial_field
from .output import (
    exit_code_for,
    report_payload,
    write_records_csv,
    write_report_json,
    write_snapshots_csv,
)
from .verification import format_table, run_verification


def _resolve_out_dir(configured: str) -> Path:
    root = os.environ.get("NONLOCAL_FLOW_OUTDIR")
    path = Path(configured)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


def execute_run(config: RunConfig, out_dir: Path) -> tuple[int, dict]:
    """Run one simulation and write the configured artifacts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    u0, m0 = build_initial_field(config.initial)
    negative_momentum = bool(np.min(m0.values) < 0.0)
    result = simulate(u0, config.solver)
    if config.emit_snapshots:
        write_snapshots_csv(out_dir / "snapshots.csv", result.snapshots)
    if config.emit_records:
        write_records_csv(out_dir / "records.csv", result.records, config.solver.max_order)
    if config.emit_report:
        write_report_json(out_dir / "report.json", result, negative_momentum)
    return exit_code_for(result), report_payload(result, negative_momentum)


def cmd_run(config_path: str) -> int:
    try:
        config = load_run_config(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    out_dir = _resolve_out_dir(config.out_dir)
    code, payload = execute_run(config, out_dir)
    print(f"termination: {payload['termination']}")
    print(f"violations: {len(payload['violations'])}")
    if payload["tail_warning"]:
        print("warning: boundary tail mass exceeded threshold on the line domain")
    if payload["negative_momentum_warning"]:
        print("warning: initial momentum changes sign; monitors report, no guarantees claimed")
    print(f"output written to {out_dir}")
    return code


def cmd_verify(seed: int) -> int:
    results = run_verification(seed)
    print(format_table(results, seed))
    return 0 if all(r.passed for r in results) else 2


def _sweep_worker(args: tuple[str, dict, str]) -> tuple[str, int, dict]:
    run_id, doc, out_dir = args
    config = parse_run_config(doc)
    code, payload = execute_run(config, Path(out_dir))
    return run_id, code, payload


def _summary_rows(outcomes: list[tuple[str, int, dict]]) -> str:
    check_ids = [c.value for c in CheckId]
    header = ["run_id", "termination", "exit_code"] + [f"margin_{c}" for c in check_ids]
    lines = [",".join(header)]
    for run_id, code, payload in outcomes:
        margins = {c["check_id"]: c["worst_margin"] for c in payload["checks"]}
        row = [run_id, payload["termination"], str(code)]
        row += [repr(float(margins.get(c, 0.0))) for c in check_ids]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_sweep(config_path: str, jobs: int | None) -> int:
    try:
        doc = load_toml(config_path)
        cases, default_jobs = expand_sweep(doc)
        base = parse_run_config(
            cases[0].config_doc, base_dir=Path(config_path).resolve().parent
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    jobs = jobs or default_jobs
    sweep_root = _resolve_out_dir(base.out_dir)
    sweep_root.mkdir(parents=True, exist_ok=True)

    tasks = []
    for case in cases:
        case_dir = sweep_root / case.run_id
        case.config_doc["output"]["directory"] = str(case_dir)
        tasks.append((case.run_id, case.config_doc, str(case_dir)))

    outcomes: list[tuple[str, int, dict]] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_sweep_worker, tasks))
    else:
        outcomes = [_sweep_worker(task) for task in tasks]

    (sweep_root / "summary.csv").write_text(_summary_rows(outcomes))
    worst = max(code for _, code, _ in outcomes)
    for run_id, code, payload in outcomes:
        print(f"{run_id}: {payload['termination']} (exit {code})")
    print(f"summary written to {sweep_root / 'summary.csv'}")
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocal-flow",
        description="Simulate the nonlocal evolution equation and verify its invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="integrate one configuration and emit diagnostics")
    p_run.add_argument("config", help="path to a TOML run configuration")
    p_verify = sub.add_parser("verify", help="run the built-in static verification suite")
    p_verify.add_argument("--seed", type=int, default=0, help="corpus seed (default 0)")
    p_sweep = sub.add_parser("sweep", help="run a parameter grid of configurations")
    p_sweep.add_argument("config", help="path to a TOML sweep configuration")
    p_sweep.add_argument("--jobs", type=int, default=None, help="parallel run count")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config)
    if args.command == "verify":
        return cmd_verify(args.seed)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.jobs)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
