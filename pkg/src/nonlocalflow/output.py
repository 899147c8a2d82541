"""CSV and JSON emission of run results.

All floating-point values are written with shortest round-trip decimal
representation (Python repr), so files re-read to the exact binary
values that were computed.
"""

from __future__ import annotations

import json
from pathlib import Path

from .diagnostics import DiagnosticsRecord, momentum
from .evolution import SimulationResult, Termination


def _fmt(x) -> str:
    return repr(float(x))


def records_header(order: int) -> list[str]:
    cols = ["t"]
    cols += [f"I_{m}" for m in range(order + 1)]
    cols += [f"k_{m}" for m in range(order)]
    cols += [f"kappa_{m}" for m in range(order + 1)]
    cols += ["u_L1", "u_int", "m_int", "m_L1", "m_min", "ux_sup"]
    cols += [f"env_{m}" for m in range(order + 1)]
    cols += ["h1_env"]
    # appended after the documented block: the self-indexed rate variant
    cols += [f"kappa_alt_{m}" for m in range(order + 1)]
    cols += [f"env_alt_{m}" for m in range(order + 1)]
    return cols


def write_records_csv(path: Path, records: list[DiagnosticsRecord], order: int) -> None:
    lines = [",".join(records_header(order))]
    for rec in records:
        row = [rec.t]
        row += list(rec.energies)
        row += list(rec.sup_norms)
        row += list(rec.rates)
        row += [rec.u_l1, rec.u_int, rec.m_int, rec.m_l1, rec.m_min, rec.ux_sup]
        row += list(rec.envelopes)
        row += [rec.h1_envelope]
        row += list(rec.rates_self)
        row += list(rec.envelopes_self)
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_snapshots_csv(path: Path, snapshots) -> None:
    lines = ["t,x,u,m"]
    for t, u in snapshots:
        m_vals = momentum(u).values
        x = u.grid.nodes
        t_str = _fmt(t)
        for i in range(u.grid.n_points):
            lines.append(f"{t_str},{_fmt(x[i])},{_fmt(u.values[i])},{_fmt(m_vals[i])}")
    path.write_text("\n".join(lines) + "\n")


def report_payload(result: SimulationResult, negative_momentum: bool) -> dict:
    violations = [
        {"t": rec.t, "check_id": check_id, "margin": margin}
        for rec in result.records
        for check_id, margin in rec.violations
    ]
    return {
        "termination": result.termination.value,
        "k1": result.k1,
        "tail_warning": result.tail_warning,
        "negative_momentum_warning": negative_momentum,
        "rhs_form_deviation": result.rhs_form_deviation,
        "checks": [
            {
                "check_id": report.check_id.value,
                "passed": report.passed,
                "worst_margin": report.worst_margin,
                "time_of_worst": report.time_of_worst,
                "tolerance": report.tolerance,
                "enforced": report.enforced,
            }
            for report in result.checks
        ],
        "violations": violations,
    }


def write_report_json(path: Path, result: SimulationResult, negative_momentum: bool) -> None:
    path.write_text(json.dumps(report_payload(result, negative_momentum), indent=2) + "\n")


def exit_code_for(result: SimulationResult) -> int:
    if result.termination is not Termination.COMPLETED:
        return 3
    failed = any(r.enforced and not r.passed for r in result.checks)
    if failed or result.violation_count > 0:
        return 2
    return 0
