"""Figure rendering for one run directory.

All figures are batch artifacts: fixed size, fixed dpi, deterministic
ids, and no timestamps, so repeated rendering of the same inputs is
byte-stable for fixed library versions.  The energy figures re-verify
that every plotted energy level stays below its envelope; the result is
reported back to the command line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "nonlocalflow-plots"

import matplotlib.pyplot as plt
import numpy as np

from .reader import Records, SnapshotSet

FIGURE_NAMES = ("energy", "drift", "slope", "margins", "waterfall", "heatmap")

_ENVELOPE_SLACK = 1e-8  # relative slack mirroring the simulator's log-space tolerance
_FLOOR = 1e-300


@dataclass(frozen=True)
class PlotJob:
    run_dir: Path
    figures: tuple[str, ...] = FIGURE_NAMES
    out_dir: Path | None = None
    image_format: str = "png"

    def resolved_out_dir(self) -> Path:
        return self.out_dir if self.out_dir is not None else self.run_dir / "figures"


@dataclass
class RenderReport:
    written: list[Path] = field(default_factory=list)
    skipped_rows: int = 0
    envelope_ok: bool = True
    envelope_failures: list[tuple[int, float]] = field(default_factory=list)


def _save(fig, out_dir: Path, stem: str, fmt: str, report: RenderReport) -> None:
    path = out_dir / f"{stem}.{fmt}"
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, dpi=110, metadata=metadata)
    plt.close(fig)
    report.written.append(path)


def check_envelopes(records: Records) -> list[tuple[int, float]]:
    """Return (order, worst ratio) for every level whose envelope is violated.

    The envelope bound applies to orders m >= 1; comparisons allow the
    same relative slack the simulator uses and treat overflowed (inf)
    envelopes as satisfied.
    """
    failures = []
    for m in range(1, records.orders + 1):
        energy = records.energy(m)
        envelope = records.envelope(m)
        with np.errstate(invalid="ignore"):
            bad = energy > envelope * (1.0 + _ENVELOPE_SLACK) + _FLOOR
        bad &= np.isfinite(energy)
        if np.any(bad):
            ratios = np.where(envelope > 0, energy / np.maximum(envelope, _FLOOR), np.inf)
            failures.append((m, float(np.max(ratios[bad]))))
    return failures


def plot_energy(records: Records, out_dir: Path, fmt: str, report: RenderReport) -> None:
    """One semilog figure per hierarchy level: energy against its envelope."""
    failures = check_envelopes(records)
    if failures:
        report.envelope_ok = False
        report.envelope_failures.extend(failures)
    t = records.t
    for m in range(records.orders + 1):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        ax.plot(t, np.maximum(records.energy(m), _FLOOR), label=f"I_{m}(t)", color="C0")
        env = records.envelope(m)
        finite = np.isfinite(env)
        ax.plot(t[finite], np.maximum(env[finite], _FLOOR), label=f"envelope_{m}",
                color="C1", linestyle="--")
        alt = records.alt_envelope(m)
        if alt is not None:
            finite = np.isfinite(alt)
            ax.plot(t[finite], np.maximum(alt[finite], _FLOOR), label=f"envelope_alt_{m}",
                    color="C2", linestyle=":")
        ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel("energy")
        title = f"order-{m} energy vs envelope"
        if m == 0:
            title += " (envelope not asserted at order 0)"
        ax.set_title(title)
        ax.legend(loc="best")
        fig.tight_layout()
        _save(fig, out_dir, f"energy_m{m}", fmt, report)


def plot_drift(records: Records, out_dir: Path, fmt: str, report: RenderReport) -> None:
    t = records.t
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name, label in (("m_int", "momentum integral"), ("u_int", "mean"), ("m_L1", "momentum L1")):
        series = records.table[name]
        ax.plot(t, series - series[0], label=f"{label} drift")
    ax.set_xlabel("t")
    ax.set_ylabel("drift from initial value")
    ax.set_title("conserved-quantity drift")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, out_dir, "drift", fmt, report)


def plot_slope(records: Records, out_dir: Path, fmt: str, report: RenderReport) -> None:
    t = records.t
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(t, records.table["ux_sup"], label="sup |u_x|", color="C0")
    ax.axhline(records.k1_reference, color="C3", linestyle="--",
               label="initial momentum L1 bound")
    ax.set_xlabel("t")
    ax.set_ylabel("slope")
    ax.set_title("slope bound")
    ax.legend(loc="best")
    fig.tight_layout()
    _save(fig, out_dir, "slope", fmt, report)


def plot_margins(records: Records, out_dir: Path, fmt: str, report: RenderReport) -> None:
    """Timelines of the check margins derivable from the record columns."""
    t = records.t
    fig, axes = plt.subplots(2, 2, figsize=(9.6, 7.2))
    ax = axes[0][0]
    ax.plot(t, records.table["m_min"], color="C0")
    ax.axhline(-1e-6, color="C3", linestyle="--", linewidth=0.8)
    ax.set_title("sign preservation: min momentum")
    ax = axes[0][1]
    ax.plot(t, records.k1_reference - records.table["ux_sup"], color="C0")
    ax.axhline(0.0, color="C3", linestyle="--", linewidth=0.8)
    ax.set_title("slope margin")
    ax = axes[1][0]
    for name in ("m_int", "u_int"):
        series = records.table[name]
        ax.plot(t, np.abs(series - series[0]), label=name)
    ax.axhline(1e-6, color="C3", linestyle="--", linewidth=0.8)
    ax.set_yscale("log")
    ax.set_ylim(bottom=1e-18)
    ax.set_title("conservation drift (log)")
    ax.legend(loc="best", fontsize="small")
    ax = axes[1][1]
    for m in range(1, records.orders + 1):
        energy = np.maximum(records.energy(m), _FLOOR)
        envelope = np.maximum(records.envelope(m), _FLOOR)
        ax.plot(t, np.log(envelope) - np.log(energy), label=f"m={m}")
    ax.axhline(0.0, color="C3", linestyle="--", linewidth=0.8)
    ax.set_title("envelope log-margins")
    ax.legend(loc="best", fontsize="small")
    for row in axes:
        for a in row:
            a.set_xlabel("t")
    fig.tight_layout()
    _save(fig, out_dir, "margins", fmt, report)


def plot_waterfall(snaps: SnapshotSet, out_dir: Path, fmt: str, report: RenderReport) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 6.4))
    if snaps.profiles:
        peak = max(float(np.max(np.abs(u))) for _, u, _ in snaps.profiles)
        offset = 1.2 * peak if peak > 0 else 1.0
        for i, (time_value, (x, u, _)) in enumerate(zip(snaps.times, snaps.profiles)):
            ax.plot(x, u + i * offset, color="C0", linewidth=0.9)
            ax.text(float(x[0]), i * offset, f" t={time_value:.3g}", fontsize=6,
                    va="bottom", color="C7")
    ax.set_xlabel("x")
    ax.set_ylabel("u (offset per snapshot)")
    ax.set_title("solution waterfall")
    fig.tight_layout()
    _save(fig, out_dir, "waterfall", fmt, report)


def plot_heatmap(
    snaps: SnapshotSet, records: Records, out_dir: Path, fmt: str, report: RenderReport
) -> None:
    """Momentum heat map with the zero level highlighted."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    regular = [
        (t, x, m)
        for t, (x, u, m) in zip(snaps.times, snaps.profiles)
        if snaps.profiles and len(x) == len(snaps.profiles[0][0])
    ]
    if regular:
        times = np.array([t for t, _, _ in regular])
        x = regular[0][1]
        matrix = np.vstack([m for _, _, m in regular])
        mesh = ax.pcolormesh(x, times, matrix, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="momentum")
        if np.min(matrix) < 0.0 < np.max(matrix):
            ax.contour(x, times, matrix, levels=[0.0], colors="white", linewidths=0.7)
    m_min = float(np.min(records.table["m_min"]))
    ax.set_title(f"momentum m(t, x); min over run = {m_min:.2e}")
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    fig.tight_layout()
    _save(fig, out_dir, "momentum_heatmap", fmt, report)
