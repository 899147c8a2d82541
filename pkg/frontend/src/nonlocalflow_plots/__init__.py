"""Batch figure generation for simulation run directories.

Consumes only the documented CSV schema (records.csv, snapshots.csv) and
writes static images; it never imports the simulator.
"""

from .figures import FIGURE_NAMES, PlotJob, RenderReport, check_envelopes
from .reader import (
    MissingColumnError,
    MissingInputError,
    Records,
    SnapshotSet,
    read_records,
    read_snapshots,
    read_table,
)

__version__ = "0.1.0"
