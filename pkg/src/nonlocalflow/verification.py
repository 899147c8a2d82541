"""Built-in static verification suite for the `verify` command.

Each check exercises one operator or bound on seeded random corpora and
reports the observed metric against its threshold.  The output is fully
deterministic for a fixed seed: same corpora, same evaluation order,
same shortest-roundtrip float formatting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .diagnostics import pointwise_inequality_sweep
from .evolution import rhs, rhs_convolution_form, rk4_step
from .fields import (
    DomainKind,
    Field,
    derivative,
    leibniz_square_derivative,
    make_grid,
    random_band_limited,
)
from .initial_data import GaussianMomentum, InitialDataSpec, build_initial_field


@dataclass(frozen=True)
class VerifyResult:
    name: str
    passed: bool
    metric: str


def _sup_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def _check_green_closed_form() -> VerifyResult:
    worst = 0.0
    worst = max(worst, abs(kernel.green(0.0, DomainKind.LINE) - 0.5))
    worst = max(worst, abs(kernel.green(1.0, DomainKind.LINE) - 0.5 * math.exp(-1.0)))
    expected = math.cosh(0.5) / (2.0 * math.sinh(0.5))
    worst = max(worst, abs(kernel.green(0.0, DomainKind.PERIODIC) - expected))
    worst = max(worst, abs(kernel.green_derivative(0.5, DomainKind.PERIODIC) - 0.0))
    worst = max(worst, abs(kernel.green_derivative(1.0, DomainKind.LINE) + 0.5 * math.exp(-1.0)))
    # |dg| <= g holds exactly for the closed forms in both geometries
    xs = np.linspace(-3.0, 3.0, 1201)
    for kind in (DomainKind.PERIODIC, DomainKind.LINE):
        excess = np.abs(kernel.green_derivative(xs, kind)) - kernel.green(xs, kind)
        worst = max(worst, float(np.max(excess)))
    return VerifyResult("green-closed-form", worst <= 1e-12, f"max_dev={worst!r}")


def _check_unit_mass() -> VerifyResult:
    worst = 0.0
    for grid in (
        make_grid(DomainKind.PERIODIC, 256),
        make_grid(DomainKind.LINE, 1024, 20.0),
    ):
        ones = Field(grid, np.ones(grid.n_points))
        worst = max(worst, _sup_diff(kernel.helmholtz_inverse(ones).values, ones.values))
        table = kernel.kernel_table(grid)
        worst = max(worst, abs(grid.spacing * float(np.sum(table.g_values)) - 1.0))
    sup_dev = max(
        abs(kernel.g_sup(DomainKind.LINE) - 0.5),
        abs(kernel.g_sup(DomainKind.PERIODIC) - math.cosh(0.5) / (2.0 * math.sinh(0.5))),
    )
    passed = worst <= 1e-10 and sup_dev <= 1e-12
    return VerifyResult("kernel-unit-mass", passed, f"max_dev={worst!r} sup_dev={sup_dev!r}")


def _check_kernel_oracle(rng: np.random.Generator) -> VerifyResult:
    worst = 0.0
    for grid in (
        make_grid(DomainKind.PERIODIC, 256),
        make_grid(DomainKind.LINE, 1024, 20.0),
    ):
        table = kernel.kernel_table(grid)
        for _ in range(5):
            f = random_band_limited(grid, rng)
            worst = max(
                worst,
                _sup_diff(
                    kernel.convolve_direct(f, table, "g").values,
                    kernel.helmholtz_inverse(f).values,
                ),
            )
            worst = max(
                worst,
                _sup_diff(
                    kernel.convolve_direct(f, table, "dg").values,
                    kernel.dx_helmholtz_inverse(f).values,
                ),
            )
    return VerifyResult("kernel-oracle", worst <= 1e-8, f"sup_err={worst!r}")


def _check_helmholtz_identity(rng: np.random.Generator) -> VerifyResult:
    grid = make_grid(DomainKind.PERIODIC, 256)
    worst = 0.0
    for _ in range(5):
        f = random_band_limited(grid, rng)
        back = derivative(kernel.helmholtz_inverse(f), 2)
        recon = kernel.helmholtz_inverse(f).values - back.values
        worst = max(worst, _sup_diff(recon, f.values))
    return VerifyResult("helmholtz-identity", worst <= 1e-8, f"sup_err={worst!r}")


def _check_operator_identity(rng: np.random.Generator) -> VerifyResult:
    # amplitude keeps the fourth derivative at O(1): the spectral noise
    # floor grows like (pi N)^order * eps and would swamp the threshold
    grid = make_grid(DomainKind.PERIODIC, 256)
    worst = 0.0
    for _ in range(5):
        f = random_band_limited(grid, rng, amplitude=1e-3)
        for n in range(1, 5):
            worst = max(worst, kernel.operator_identity_residual(f, n))
    return VerifyResult("operator-identity", worst <= 1e-7, f"residual={worst!r}")


def _check_leibniz(rng: np.random.Generator) -> VerifyResult:
    grid = make_grid(DomainKind.PERIODIC, 512)
    worst = 0.0
    for _ in range(5):
        f = random_band_limited(grid, rng, amplitude=1e-3)
        sq = Field(grid, f.values**2)
        for n in range(5):
            worst = max(
                worst,
                _sup_diff(leibniz_square_derivative(f, n).values, derivative(sq, n).values),
            )
    return VerifyResult("leibniz-consistency", worst <= 1e-8, f"sup_err={worst!r}")


def _run_sweeps(rng: np.random.Generator, count: int):
    grid = make_grid(DomainKind.PERIODIC, 256)
    reports = []
    for _ in range(count):
        f = random_band_limited(grid, rng)
        for n in range(1, 5):
            reports.extend(pointwise_inequality_sweep(f, n))
    return reports


def _check_pointwise_bounds(rng: np.random.Generator) -> VerifyResult:
    from .diagnostics import CheckId

    wanted = {CheckId.TRIPLE_PRODUCT, CheckId.SQUARE_DERIVATIVE}
    reports = [r for r in _run_sweeps(rng, 20) if r.check_id in wanted]
    worst = min(r.worst_margin for r in reports)
    passed = all(r.passed for r in reports)
    return VerifyResult("pointwise-bounds", passed, f"worst_margin={worst!r}")


def _check_integral_bounds(rng: np.random.Generator) -> VerifyResult:
    from .diagnostics import CheckId

    wanted = {CheckId.PAIRING_INTEGRAL, CheckId.CONVOLUTION_INTEGRAL}
    reports = [r for r in _run_sweeps(rng, 20) if r.check_id in wanted]
    worst = min(r.worst_margin for r in reports)
    passed = all(r.passed for r in reports)
    return VerifyResult("integral-bounds", passed, f"worst_margin={worst!r}")


def _check_rhs_forms(rng: np.random.Generator) -> VerifyResult:
    worst = 0.0
    for grid in (
        make_grid(DomainKind.PERIODIC, 256),
        make_grid(DomainKind.LINE, 256, 20.0),
    ):
        for _ in range(3):
            f = random_band_limited(grid, rng)
            worst = max(worst, _sup_diff(rhs(f).values, rhs_convolution_form(f).values))
    return VerifyResult("rhs-consistency", worst <= 1e-10, f"sup_err={worst!r}")


def _check_rk4_order() -> VerifyResult:
    grid = make_grid(DomainKind.PERIODIC, 128)
    u0, _ = build_initial_field(InitialDataSpec(GaussianMomentum(1.0, 0.5, 0.05), grid))
    t_end = 0.5
    dt = 2e-3

    def advance(step: float) -> np.ndarray:
        u = u0
        for _ in range(round(t_end / step)):
            u = rk4_step(u, step)
        return u.values

    ref = advance(dt / 16.0)
    err_coarse = _sup_diff(advance(dt), ref)
    err_fine = _sup_diff(advance(dt / 2.0), ref)
    order = math.log2(err_coarse / err_fine)
    return VerifyResult("rk4-order", 3.5 <= order <= 4.5, f"observed_order={order!r}")


def run_verification(seed: int) -> list[VerifyResult]:
    rng = np.random.default_rng(seed)
    return [
        _check_green_closed_form(),
        _check_unit_mass(),
        _check_kernel_oracle(rng),
        _check_helmholtz_identity(rng),
        _check_operator_identity(rng),
        _check_leibniz(rng),
        _check_pointwise_bounds(rng),
        _check_integral_bounds(rng),
        _check_rhs_forms(rng),
        _check_rk4_order(),
    ]


def format_table(results: list[VerifyResult], seed: int) -> str:
    lines = [f"verification suite (seed={seed})"]
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"  {r.name:<{width}}  {status}  {r.metric}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        lines.append(f"FAILED: {', '.join(failed)}")
    else:
        lines.append("all checks passed")
    return "\n".join(lines)
