"""Readers for the fixed-schema CSV files a run directory contains.

The tool is coupled to the simulator only through these files:
records.csv (one row per diagnostics record) and snapshots.csv
(long-format t, x, u, m).  Rows that fail numeric parsing are skipped and
counted; missing files and missing columns raise errors that name the
offender.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class MissingInputError(FileNotFoundError):
    pass


class MissingColumnError(KeyError):
    def __str__(self) -> str:  # KeyError would add quotes around the message
        return self.args[0]


@dataclass
class Table:
    """Column-oriented view of a numeric CSV file."""

    path: Path
    columns: dict[str, np.ndarray]
    skipped_rows: int = 0

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise MissingColumnError(f"{self.path.name} has no column {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0


def read_table(path: Path) -> Table:
    if not path.exists():
        raise MissingInputError(f"missing input file: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MissingInputError(f"input file is empty: {path}")
    header = [name.strip() for name in rows[0]]
    data: list[list[float]] = []
    skipped = 0
    for row in rows[1:]:
        if len(row) != len(header):
            skipped += 1
            continue
        try:
            data.append([float(v) for v in row])
        except ValueError:
            skipped += 1
    columns = {
        name: np.array([row[i] for row in data], dtype=np.float64)
        for i, name in enumerate(header)
    }
    return Table(path, columns, skipped)


@dataclass
class Records:
    """records.csv with the energy/envelope hierarchy discovered from the header."""

    table: Table
    orders: int  # hierarchy depth n: columns I_0..I_n are present

    @property
    def t(self) -> np.ndarray:
        return self.table["t"]

    def energy(self, m: int) -> np.ndarray:
        return self.table[f"I_{m}"]

    def envelope(self, m: int) -> np.ndarray:
        return self.table[f"env_{m}"]

    def alt_envelope(self, m: int) -> np.ndarray | None:
        name = f"env_alt_{m}"
        return self.table[name] if name in self.table else None

    @property
    def k1_reference(self) -> float:
        # the slope bound constant is the initial momentum L1 norm
        return float(self.table["m_L1"][0])


def read_records(run_dir: Path) -> Records:
    table = read_table(run_dir / "records.csv")
    table["t"]  # required columns fail early with a named error
    orders = -1
    while f"I_{orders + 1}" in table:
        orders += 1
    if orders < 0:
        raise MissingColumnError(f"{table.path.name} has no column 'I_0'")
    for name in ("u_int", "m_int", "m_L1", "m_min", "ux_sup", "h1_env"):
        table[name]
    return Records(table, orders)


@dataclass
class SnapshotSet:
    times: list[float]
    profiles: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=list)
    skipped_rows: int = 0


def read_snapshots(run_dir: Path) -> SnapshotSet:
    table = read_table(run_dir / "snapshots.csv")
    t, x = table["t"], table["x"]
    u, m = table["u"], table["m"]
    snaps = SnapshotSet(times=[], skipped_rows=table.skipped_rows)
    if len(t) == 0:
        return snaps
    boundaries = np.flatnonzero(np.diff(t) != 0.0) + 1
    for chunk in np.split(np.arange(len(t)), boundaries):
        snaps.times.append(float(t[chunk[0]]))
        snaps.profiles.append((x[chunk], u[chunk], m[chunk]))
    return snaps
