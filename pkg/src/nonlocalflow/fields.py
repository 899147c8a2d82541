"""Uniform 1-D grids, sampled fields, and FFT-based calculus.

Two geometries are supported: the unit circle [0, 1) and a truncated real
line [-L, L) treated as a periodic box of extent 2L.  All differentiation
is spectral (Fourier multipliers (i 2 pi k)^order), and all integrals are
the uniform trapezoid rule, which on a periodic grid reduces to
spacing * sum(values) and is exact to roundoff for band-limited integrands.

The module also provides the energy hierarchy used by the runtime
monitors: the pointwise density 0.5 * sum_{j<=m} (d^j u)^2, its integral,
and the running maximum of derivative sup-norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from .errors import NonFiniteFieldError

MIN_POINTS = 16


class DomainKind(Enum):
    PERIODIC = "periodic"
    LINE = "line"


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on the unit circle or on a symmetric box [-L, L).

    ``size`` is the period (always 1) for PERIODIC and the half-width L
    for LINE.  Nodes are j/n for the circle and -L + j * (2L/n) for the
    box; both layouts omit the right endpoint.
    """

    kind: DomainKind
    n_points: int
    size: float

    def __post_init__(self) -> None:
        if self.n_points < MIN_POINTS:
            raise ValueError(f"grid too coarse: n_points={self.n_points} < {MIN_POINTS}")
        if self.size <= 0:
            raise ValueError(f"non-positive domain size: {self.size}")
        if self.kind is DomainKind.PERIODIC and self.size != 1.0:
            raise ValueError("periodic domain has period fixed at 1")

    @property
    def extent(self) -> float:
        return self.size if self.kind is DomainKind.PERIODIC else 2.0 * self.size

    @property
    def spacing(self) -> float:
        return self.extent / self.n_points

    @cached_property
    def nodes(self) -> np.ndarray:
        start = 0.0 if self.kind is DomainKind.PERIODIC else -self.size
        x = start + self.spacing * np.arange(self.n_points)
        x.setflags(write=False)
        return x

    @property
    def max_derivative_order(self) -> int:
        # guard against amplifying the highest retained modes into aliasing noise
        return self.n_points // 4


def make_grid(kind: DomainKind, n_points: int, halfwidth: float | None = None) -> Grid1D:
    """Build a grid; ``halfwidth`` is required for LINE and ignored otherwise."""
    if kind is DomainKind.LINE:
        if halfwidth is None or halfwidth <= 0:
            raise ValueError("line domain requires a positive halfwidth")
        return Grid1D(kind, n_points, float(halfwidth))
    return Grid1D(kind, n_points, 1.0)


@dataclass(frozen=True)
class Field:
    """Real-valued samples of a function at the grid nodes."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"field length {vals.shape} does not match grid n_points={self.grid.n_points}"
            )
        if not np.isfinite(vals).all():
            raise NonFiniteFieldError("field contains NaN or Inf")
        object.__setattr__(self, "values", vals)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def zero_field(grid: Grid1D) -> Field:
    return Field(grid, np.zeros(grid.n_points))


def field_from_function(grid: Grid1D, fn) -> Field:
    return Field(grid, np.asarray(fn(grid.nodes), dtype=np.float64))


@lru_cache(maxsize=64)
def _wavenumbers(grid: Grid1D) -> np.ndarray:
    # cycles per unit length, rfft layout
    k = np.fft.rfftfreq(grid.n_points, d=grid.spacing)
    k.setflags(write=False)
    return k


def _derivative_values(grid: Grid1D, values: np.ndarray, order: int) -> np.ndarray:
    spectrum = np.fft.rfft(values)
    spectrum *= (2j * np.pi * _wavenumbers(grid)) ** order
    if order % 2 == 1 and grid.n_points % 2 == 0:
        spectrum[-1] = 0.0  # Nyquist mode carries no sign information for odd orders
    return np.fft.irfft(spectrum, n=grid.n_points)


def derivative(f: Field, order: int) -> Field:
    """Spectral derivative of the given order; order 0 is the identity."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    if order == 0:
        return f
    if order > f.grid.max_derivative_order:
        raise ValueError(
            f"derivative order {order} exceeds guard n_points/4 = {f.grid.max_derivative_order}"
        )
    return Field(f.grid, _derivative_values(f.grid, f.values, order))


def derivatives_up_to(f: Field, order: int) -> list[Field]:
    """[f, f', ..., f^(order)] with a single forward transform."""
    if order > f.grid.max_derivative_order:
        raise ValueError(
            f"derivative order {order} exceeds guard n_points/4 = {f.grid.max_derivative_order}"
        )
    base = np.fft.rfft(f.values)
    ik = 2j * np.pi * _wavenumbers(f.grid)
    out = [f]
    for j in range(1, order + 1):
        spectrum = base * ik**j
        if j % 2 == 1 and f.grid.n_points % 2 == 0:
            spectrum[-1] = 0.0
        out.append(Field(f.grid, np.fft.irfft(spectrum, n=f.grid.n_points)))
    return out


def integrate(f: Field) -> float:
    """Trapezoid quadrature over the domain (periodic uniform grid)."""
    return float(np.sum(f.values)) * f.grid.spacing


def lp_norm(f: Field, p: float) -> float:
    """Discrete L^p norm for p in {1, 2, inf}."""
    if p == 1:
        return float(np.sum(np.abs(f.values))) * f.grid.spacing
    if p == 2:
        return math.sqrt(float(np.sum(f.values**2)) * f.grid.spacing)
    if p == math.inf:
        return f.sup()
    raise ValueError(f"unsupported norm exponent {p}")


def binom(n: int, k: int) -> int:
    """Binomial coefficient extended by zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def leibniz_square_derivative(f: Field, n: int) -> Field:
    """n-th derivative of f^2 via the binomial product expansion.

    sum_{k=0..n} C(n, k) (d^{n-k} f)(d^k f); agrees with the direct
    spectral derivative of f*f on band-limited fields.
    """
    ds = derivatives_up_to(f, n)
    acc = np.zeros(f.grid.n_points)
    for k in range(n + 1):
        acc += binom(n, k) * ds[n - k].values * ds[k].values
    return Field(f.grid, acc)


def energy_density(f: Field, order: int) -> Field:
    """Pointwise 0.5 * sum_{j=0..order} (d^j f)^2; non-negative everywhere."""
    ds = derivatives_up_to(f, order)
    acc = np.zeros(f.grid.n_points)
    for d in ds:
        acc += d.values**2
    return Field(f.grid, 0.5 * acc)


def energy(f: Field, order: int) -> float:
    """Integral of the energy density; the squared H^order norm equals twice this."""
    return integrate(energy_density(f, order))


def derivative_sup_max(f: Field, orders: int) -> float:
    """max_{0 <= j < orders} of the node sup-norm of d^j f."""
    if orders < 1:
        raise ValueError("orders must be positive")
    ds = derivatives_up_to(f, orders - 1)
    return max(d.sup() for d in ds)


@dataclass(frozen=True)
class EnergyProfile:
    """Energy hierarchy entries at a fixed derivative order."""

    order: int
    density: Field
    total: float
    sup_bound: float | None = None


def energy_profile(f: Field, order: int, with_sup: bool = False) -> EnergyProfile:
    density = energy_density(f, order)
    total = integrate(density)
    sup_bound = derivative_sup_max(f, order + 1) if with_sup else None
    return EnergyProfile(order, density, total, sup_bound)


def random_band_limited(
    grid: Grid1D,
    rng: np.random.Generator,
    max_mode: int = 8,
    amplitude: float = 1.0,
    decay: float = 0.4,
) -> Field:
    """Random smooth field with Fourier content confined to |k| <= max_mode.

    Mode amplitudes decay exponentially so that high derivatives stay at
    moderate scale; the result is rescaled to the requested sup-norm.
    """
    if max_mode >= grid.n_points // 2:
        raise ValueError("max_mode must sit below the Nyquist mode")
    spectrum = np.zeros(grid.n_points // 2 + 1, dtype=complex)
    weights = np.exp(-decay * np.arange(1, max_mode + 1))
    spectrum[1 : max_mode + 1] = weights * (
        rng.standard_normal(max_mode) + 1j * rng.standard_normal(max_mode)
    )
    spectrum[0] = 0.5 * rng.standard_normal()
    values = np.fft.irfft(spectrum, n=grid.n_points)
    peak = np.max(np.abs(values))
    if peak > 0:
        values *= amplitude / peak
    return Field(grid, values)


def random_nonneg_band_limited(
    grid: Grid1D,
    rng: np.random.Generator,
    max_mode: int = 8,
    amplitude: float = 1.0,
) -> Field:
    """Non-negative smooth field: the square of a band-limited field.

    Squaring doubles the bandwidth, so max_mode must stay below a quarter
    of n_points for the result to remain alias-free.
    """
    base = random_band_limited(grid, rng, max_mode=max_mode, amplitude=1.0)
    values = base.values**2
    peak = np.max(values)
    if peak > 0:
        values *= amplitude / peak
    return Field(grid, values)
