"""TOML run configuration: typed sections, strict keys, helpful errors.

Every parse failure raises ConfigError with a message naming the bad or
missing key, so the command line can fail fast with a usable diagnostic.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .evolution import SolverConfig
from .fields import DomainKind, Grid1D, make_grid
from .initial_data import (
    CosineBumpMomentum,
    ExplicitFile,
    GaussianMomentum,
    InitialDataSpec,
    MollifiedPeakon,
    RandomNonnegMomentum,
)


@dataclass(frozen=True)
class RunConfig:
    grid: Grid1D
    initial: InitialDataSpec
    solver: SolverConfig
    out_dir: str
    emit_snapshots: bool = True
    emit_records: bool = True
    emit_report: bool = True


_REQUIRED = object()


class _Section:
    """Typed accessor over one TOML table that tracks unknown keys."""

    def __init__(self, name: str, data: dict):
        if not isinstance(data, dict):
            raise ConfigError(f"section [{name}] must be a table")
        self.name = name
        self.data = data
        self.seen: set[str] = set()

    def take(self, key: str, kind, default=_REQUIRED):
        self.seen.add(key)
        if key not in self.data:
            if default is _REQUIRED:
                raise ConfigError(f"missing key {self.name}.{key}")
            return default
        value = self.data[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
            raise ConfigError(
                f"bad value for {self.name}.{key}: expected {kind.__name__}, got {value!r}"
            )
        return value

    def finish(self) -> None:
        unknown = set(self.data) - self.seen
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(f"unknown key {self.name}.{key}")


def _parse_grid(data: dict) -> Grid1D:
    sec = _Section("grid", data)
    domain = sec.take("domain", str)
    n_points = sec.take("n_points", int)
    if domain == "periodic":
        sec.take("halfwidth", float, None)  # tolerated but unused
        kind = DomainKind.PERIODIC
        halfwidth = None
    elif domain == "line":
        halfwidth = sec.take("halfwidth", float, 20.0)
        kind = DomainKind.LINE
    else:
        raise ConfigError(f"bad value for grid.domain: expected 'periodic' or 'line', got {domain!r}")
    sec.finish()
    try:
        return make_grid(kind, n_points, halfwidth)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _parse_initial(data: dict, grid: Grid1D) -> InitialDataSpec:
    sec = _Section("initial", data)
    kind_name = sec.take("kind", str)
    default_center = 0.5 if grid.kind is DomainKind.PERIODIC else 0.0
    try:
        if kind_name == "gaussian_momentum":
            kind = GaussianMomentum(
                amplitude=sec.take("amplitude", float),
                center=sec.take("center", float, default_center),
                width=sec.take("width", float),
            )
        elif kind_name == "mollified_peakon":
            kind = MollifiedPeakon(
                height=sec.take("height", float),
                center=sec.take("center", float, default_center),
                mollify_width=sec.take("mollify_width", float),
            )
        elif kind_name == "cosine_bump_momentum":
            kind = CosineBumpMomentum(
                amplitude=sec.take("amplitude", float),
                center=sec.take("center", float, default_center),
                support_width=sec.take("support_width", float),
            )
        elif kind_name == "random_momentum":
            kind = RandomNonnegMomentum(
                seed=sec.take("seed", int, 0),
                n_modes=sec.take("n_modes", int, 8),
                amplitude=sec.take("amplitude", float),
            )
        elif kind_name == "file":
            kind = ExplicitFile(path=sec.take("path", str))
        else:
            raise ConfigError(f"bad value for initial.kind: unknown kind {kind_name!r}")
    except ValueError as exc:
        raise ConfigError(f"initial: {exc}") from exc
    sec.finish()
    return InitialDataSpec(kind, grid)


def _parse_solver(data: dict) -> SolverConfig:
    sec = _Section("solver", data)
    try:
        config = SolverConfig(
            t_end=sec.take("t_end", float),
            dt_initial=sec.take("dt_initial", float),
            error_tolerance=sec.take("error_tolerance", float, 1e-9),
            dt_min=sec.take("dt_min", float, 1e-8),
            max_order=sec.take("max_order", int, 3),
            snapshot_stride=sec.take("snapshot_stride", int, 100),
            monitor_stride=sec.take("monitor_stride", int, 10),
            dealias=sec.take("dealias", bool, False),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc
    sec.finish()
    return config


def parse_run_config(doc: dict, base_dir: Path | None = None) -> RunConfig:
    """Build a RunConfig from a parsed TOML document."""
    known = {"grid", "initial", "solver", "output", "sweep"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]}")
    for section in ("grid", "initial", "solver", "output"):
        if section not in doc:
            raise ConfigError(f"missing key {section}")
    grid = _parse_grid(doc["grid"])
    initial = _parse_initial(doc["initial"], grid)
    solver = _parse_solver(doc["solver"])
    out = _Section("output", doc["output"])
    out_dir = out.take("directory", str)
    emit_snapshots = out.take("snapshots", bool, True)
    emit_records = out.take("records", bool, True)
    emit_report = out.take("report", bool, True)
    out.finish()
    if base_dir is not None and isinstance(initial.kind, ExplicitFile):
        path = Path(initial.kind.path)
        if not path.is_absolute():
            initial = InitialDataSpec(ExplicitFile(str(base_dir / path)), grid)
    return RunConfig(grid, initial, solver, out_dir, emit_snapshots, emit_records, emit_report)


def load_toml(path: str | Path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid TOML: {exc}") from exc


def load_run_config(path: str | Path) -> RunConfig:
    return parse_run_config(load_toml(path), base_dir=Path(path).resolve().parent)


def _set_by_path(doc: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = doc
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise ConfigError(f"sweep: override path {dotted!r} does not name a config key")
        node = node[part]
    if parts[-1] not in node:
        # overriding a key that relies on its default is allowed
        pass
    node[parts[-1]] = value


@dataclass(frozen=True)
class SweepCase:
    run_id: str
    overrides: tuple[tuple[str, object], ...]
    config_doc: dict


def expand_sweep(doc: dict) -> tuple[list[SweepCase], int]:
    """Expand the [sweep] table into the cartesian product of its overrides.

    Returns the cases plus the configured default job count.  The sweep
    table maps dotted config paths to lists of values; an empty or
    missing table is a configuration error.
    """
    import copy
    import itertools

    if "sweep" not in doc or not isinstance(doc["sweep"], dict):
        raise ConfigError("missing key sweep")
    sweep = dict(doc["sweep"])
    jobs = sweep.pop("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        raise ConfigError("bad value for sweep.jobs: expected positive integer")
    axes = []
    for key, values in sorted(sweep.items()):
        if not isinstance(values, list) or not values:
            raise ConfigError(f"bad value for sweep.{key}: expected a non-empty list")
        axes.append((key, values))
    if not axes:
        raise ConfigError("sweep: empty parameter grid")
    cases = []
    for index, combo in enumerate(itertools.product(*[vals for _, vals in axes])):
        overrides = tuple(zip([key for key, _ in axes], combo))
        case_doc = copy.deepcopy({k: v for k, v in doc.items() if k != "sweep"})
        for key, value in overrides:
            _set_by_path(case_doc, key, value)
        label = "_".join(f"{key.split('.')[-1]}={value}" for key, value in overrides)
        cases.append(SweepCase(f"{index:03d}_{label}", overrides, case_doc))
    return cases, jobs
