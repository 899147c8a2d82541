"""Command line: render figures from one run directory.

    plots <run_dir> [--figures energy,drift,...] [--format png|svg] [--out DIR]

Exit codes: 0 all requested figures rendered and the envelope re-check
held; 1 usage or input error (missing file/column, named in the message);
2 figures rendered but the plotted data violates an energy envelope.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import (
    FIGURE_NAMES,
    PlotJob,
    RenderReport,
    plot_drift,
    plot_energy,
    plot_heatmap,
    plot_margins,
    plot_slope,
    plot_waterfall,
)
from .reader import MissingColumnError, MissingInputError, read_records, read_snapshots


def render(job: PlotJob) -> RenderReport:
    out_dir = job.resolved_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    report = RenderReport()

    needs_records = {"energy", "drift", "slope", "margins", "heatmap"}
    needs_snapshots = {"waterfall", "heatmap"}
    records = None
    snaps = None
    if needs_records & set(job.figures):
        records = read_records(job.run_dir)
        report.skipped_rows += records.table.skipped_rows
    if needs_snapshots & set(job.figures):
        snaps = read_snapshots(job.run_dir)
        report.skipped_rows += snaps.skipped_rows

    fmt = job.image_format
    for name in job.figures:
        if name == "energy":
            plot_energy(records, out_dir, fmt, report)
        elif name == "drift":
            plot_drift(records, out_dir, fmt, report)
        elif name == "slope":
            plot_slope(records, out_dir, fmt, report)
        elif name == "margins":
            plot_margins(records, out_dir, fmt, report)
        elif name == "waterfall":
            plot_waterfall(snaps, out_dir, fmt, report)
        elif name == "heatmap":
            plot_heatmap(snaps, records, out_dir, fmt, report)
        else:
            raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURE_NAMES)}")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render diagnostic figures from a simulation run directory.",
    )
    parser.add_argument("run_dir", help="directory containing records.csv / snapshots.csv")
    parser.add_argument(
        "--figures",
        default=",".join(FIGURE_NAMES),
        help=f"comma-separated subset of: {', '.join(FIGURE_NAMES)}",
    )
    parser.add_argument("--format", default="png", choices=("png", "svg"), dest="image_format")
    parser.add_argument("--out", default=None, help="output directory (default: <run_dir>/figures)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    figures = tuple(name.strip() for name in args.figures.split(",") if name.strip())
    job = PlotJob(
        run_dir=Path(args.run_dir),
        figures=figures,
        out_dir=Path(args.out) if args.out else None,
        image_format=args.image_format,
    )
    try:
        report = render(job)
    except (MissingInputError, MissingColumnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in report.written:
        print(f"wrote {path}")
    if report.skipped_rows:
        print(f"warning: skipped {report.skipped_rows} corrupt CSV row(s)")
    if not report.envelope_ok:
        worst = ", ".join(f"m={m} (ratio {ratio:.3g})" for m, ratio in report.envelope_failures)
        print(f"envelope re-check FAILED: energy exceeds envelope at {worst}", file=sys.stderr)
        return 2
    print("envelope re-check: energies stay below their envelopes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
