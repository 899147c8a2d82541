"""Initial-data constructors built around a non-negative momentum profile.

Each kind produces momentum samples m0 >= 0 (exactly, by construction),
and the velocity follows as u0 = G m0 with G the inverse Helmholtz
operator, so that u0 - u0'' reproduces m0 to spectral accuracy.  Profiles
are periodized over the embedding box so they stay smooth across the
wrap point in both geometries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fields import Field, Grid1D
from .kernel import helmholtz_inverse


@dataclass(frozen=True)
class GaussianMomentum:
    amplitude: float
    center: float
    width: float

    def __post_init__(self) -> None:
        if self.amplitude <= 0 or self.width <= 0:
            raise ValueError("gaussian momentum needs positive amplitude and width")


@dataclass(frozen=True)
class MollifiedPeakon:
    """Narrow unit-mass bump scaled so the resulting wave has the given height.

    The sharply peaked travelling wave of height h carries momentum
    2 h delta; mollifying the point mass with a gaussian of the given
    width keeps the data inside the smooth class while reproducing the
    exp(-|x|) profile to O(width^2).
    """

    height: float
    center: float
    mollify_width: float

    def __post_init__(self) -> None:
        if self.height <= 0 or self.mollify_width <= 0:
            raise ValueError("mollified peakon needs positive height and width")


@dataclass(frozen=True)
class CosineBumpMomentum:
    amplitude: float
    center: float
    support_width: float

    def __post_init__(self) -> None:
        if self.amplitude <= 0 or self.support_width <= 0:
            raise ValueError("cosine bump needs positive amplitude and support width")


@dataclass(frozen=True)
class RandomNonnegMomentum:
    """Seeded random trigonometric polynomial, shifted and rescaled.

    Subtracting the node minimum and rescaling to the requested amplitude
    keeps the profile exactly non-negative without clipping, which would
    break smoothness.
    """

    seed: int
    n_modes: int
    amplitude: float

    def __post_init__(self) -> None:
        if self.n_modes < 1 or self.amplitude <= 0:
            raise ValueError("random momentum needs n_modes >= 1 and positive amplitude")


@dataclass(frozen=True)
class ExplicitFile:
    path: str


InitialKind = GaussianMomentum | MollifiedPeakon | CosineBumpMomentum | RandomNonnegMomentum | ExplicitFile


@dataclass(frozen=True)
class InitialDataSpec:
    kind: InitialKind
    grid: Grid1D


def _periodized_gaussian(grid: Grid1D, center: float, width: float, mass_density: bool) -> np.ndarray:
    """Sum of gaussian images over the embedding box, smooth at the wrap."""
    x = grid.nodes
    extent = grid.extent
    out = np.zeros(grid.n_points)
    for image in range(-3, 4):
        d = x - center + image * extent
        out += np.exp(-0.5 * (d / width) ** 2)
    if mass_density:
        out /= width * math.sqrt(2.0 * math.pi)
    return out


def _wrapped_distance(grid: Grid1D, center: float) -> np.ndarray:
    extent = grid.extent
    d = grid.nodes - center
    return d - np.round(d / extent) * extent


def _resample_band_limited(values: np.ndarray, n_target: int) -> np.ndarray:
    """Exact trigonometric resampling by spectrum padding or truncation."""
    n_src = len(values)
    spectrum = np.fft.rfft(values)
    target = np.zeros(n_target // 2 + 1, dtype=complex)
    keep = min(len(spectrum), len(target))
    target[:keep] = spectrum[:keep]
    if keep == len(target) and n_target < n_src and n_target % 2 == 0:
        target[-1] = target[-1].real  # fold the target Nyquist bin to keep the field real
    return np.fft.irfft(target, n=n_target) * (n_target / n_src)


def _load_explicit(spec: ExplicitFile, grid: Grid1D) -> np.ndarray:
    path = Path(spec.path)
    if not path.exists():
        raise ConfigError(f"initial.path: file not found: {path}")
    data = np.loadtxt(path, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 4:
        raise ConfigError(f"initial.path: expected two numeric columns (x, momentum) in {path}")
    x, m = data[:, 0], data[:, 1]
    steps = np.diff(x)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
        raise ConfigError("initial.path: x column must be uniformly increasing")
    extent = steps[0] * len(x)
    start = grid.nodes[0]
    if abs(extent - grid.extent) > 1e-8 * grid.extent or abs(x[0] - start) > 1e-8 * grid.extent:
        raise ConfigError(
            f"initial.path: file domain [{x[0]}, {x[0] + extent}) does not match the grid"
        )
    return _resample_band_limited(m, grid.n_points)


def momentum_profile(kind: InitialKind, grid: Grid1D) -> np.ndarray:
    if isinstance(kind, GaussianMomentum):
        return kind.amplitude * _periodized_gaussian(grid, kind.center, kind.width, False)
    if isinstance(kind, MollifiedPeakon):
        return 2.0 * kind.height * _periodized_gaussian(grid, kind.center, kind.mollify_width, True)
    if isinstance(kind, CosineBumpMomentum):
        d = _wrapped_distance(grid, kind.center)
        inside = np.abs(d) <= 0.5 * kind.support_width
        vals = np.zeros(grid.n_points)
        vals[inside] = 0.5 * kind.amplitude * (1.0 + np.cos(2.0 * np.pi * d[inside] / kind.support_width))
        return vals
    if isinstance(kind, RandomNonnegMomentum):
        rng = np.random.default_rng(kind.seed)
        x = grid.nodes / grid.extent
        vals = np.zeros(grid.n_points)
        for k in range(1, kind.n_modes + 1):
            a, b = rng.standard_normal(2)
            vals += a * np.cos(2.0 * np.pi * k * x) + b * np.sin(2.0 * np.pi * k * x)
        vals -= np.min(vals)
        peak = np.max(vals)
        if peak > 0:
            vals *= kind.amplitude / peak
        return vals
    if isinstance(kind, ExplicitFile):
        return _load_explicit(kind, grid)
    raise TypeError(f"unknown initial data kind: {kind!r}")


def build_initial_field(spec: InitialDataSpec) -> tuple[Field, Field]:
    """Return (u0, m0) with u0 the Helmholtz inverse of the momentum profile.

    Explicit files may carry sign-changing momentum; such data is
    accepted (min(m0.values) < 0 tells the caller to flag a warning),
    while the generated kinds are non-negative by construction.
    """
    m0 = Field(spec.grid, momentum_profile(spec.kind, spec.grid))
    u0 = helmholtz_inverse(m0)
    return u0, m0
