"""Runtime verification of the conservation laws and a-priori bounds.

Every inequality the solver is expected to honour is expressed as a
check with a signed margin (positive slack = satisfied).  Pointwise
bounds are evaluated at every node, integral bounds by quadrature, and
the exponential envelopes by trapezoid accumulation of their rate
integrals along the recorded history.  Envelope comparisons are done in
log space so that large exponents neither overflow nor lose the margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .fields import (
    Field,
    binom,
    derivative,
    derivatives_up_to,
    integrate,
    lp_norm,
)
from .kernel import g_sup, one_plus_dx_helmholtz_inverse

# Tolerance classes (absolute slack; relative slack is folded into margins).
TOL_POINTWISE = 1e-12
TOL_RELATIVE = 1e-9
TOL_INTEGRAL = 1e-8
TOL_CONSERVATION = 1e-6
TOL_SLOPE = 1e-8
TOL_SIGN = 1e-6
TOL_ENVELOPE = 1e-8  # log-space slack for exponential envelopes
TOL_GROWTH = 1e-6

_LOG_FLOOR = 1e-300


class CheckId(str, Enum):
    TRIPLE_PRODUCT = "triple_product_bound"
    SQUARE_DERIVATIVE = "square_derivative_bound"
    PAIRING_INTEGRAL = "integral_pairing_bound"
    CONVOLUTION_INTEGRAL = "convolution_integral_bound"
    DERIVATIVE_GROWTH = "derivative_growth_bound"
    GRONWALL = "gronwall_envelope"
    MOMENTUM_CONSERVATION = "momentum_conservation"
    MASS_CONSERVATION = "mass_conservation"
    SLOPE_BOUND = "slope_bound"
    SIGN_PRESERVATION = "sign_preservation"
    H1_GROWTH = "h1_growth"


# Checks that count toward the violation tally / exit code.  The
# derivative-growth bound is monitored informationally only: its finite
# difference estimator between records is not a pointwise-in-time
# derivative, so it does not gate a run.
ENFORCED = frozenset(
    {
        CheckId.TRIPLE_PRODUCT,
        CheckId.SQUARE_DERIVATIVE,
        CheckId.PAIRING_INTEGRAL,
        CheckId.CONVOLUTION_INTEGRAL,
        CheckId.GRONWALL,
        CheckId.MOMENTUM_CONSERVATION,
        CheckId.MASS_CONSERVATION,
        CheckId.SLOPE_BOUND,
        CheckId.SIGN_PRESERVATION,
        CheckId.H1_GROWTH,
    }
)

TOLERANCES = {
    CheckId.TRIPLE_PRODUCT: TOL_POINTWISE,
    CheckId.SQUARE_DERIVATIVE: TOL_POINTWISE,
    CheckId.PAIRING_INTEGRAL: TOL_INTEGRAL,
    CheckId.CONVOLUTION_INTEGRAL: TOL_INTEGRAL,
    CheckId.DERIVATIVE_GROWTH: TOL_GROWTH,
    CheckId.GRONWALL: TOL_ENVELOPE,
    CheckId.MOMENTUM_CONSERVATION: TOL_CONSERVATION,
    CheckId.MASS_CONSERVATION: TOL_CONSERVATION,
    CheckId.SLOPE_BOUND: TOL_SLOPE,
    CheckId.SIGN_PRESERVATION: TOL_SIGN,
    CheckId.H1_GROWTH: TOL_ENVELOPE,
}


@dataclass(frozen=True)
class CheckReport:
    check_id: CheckId
    worst_margin: float
    time_of_worst: float
    passed: bool
    tolerance: float

    @property
    def enforced(self) -> bool:
        return self.check_id in ENFORCED


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time sample of every tracked functional and check margin.

    energies[m] is the order-m energy integral for m = 0..n; sup_norms[j]
    the running max of derivative sup-norms for j = 0..n-1; rates the
    envelope rate coefficients (literal order-n form) and rates_self the
    variant with the hierarchy depth replaced by m itself.  envelopes[m]
    is energies-at-zero times exp(m * integral of rates[m]); values may
    overflow to inf for steep rates, the margins are kept in log space.
    """

    t: float
    energies: tuple[float, ...]
    sup_norms: tuple[float, ...]
    rates: tuple[float, ...]
    rates_self: tuple[float, ...]
    u_l1: float
    u_int: float
    m_int: float
    m_l1: float
    m_min: float
    ux_sup: float
    envelopes: tuple[float, ...]
    envelopes_self: tuple[float, ...]
    h1_envelope: float
    violations: tuple[tuple[str, float], ...] = field(default=())


def momentum(u: Field) -> Field:
    """u minus its second derivative (the Helmholtz image of u)."""
    return Field(u.grid, u.values - derivative(u, 2).values)


def conserved_quantities(u: Field) -> tuple[float, float, float]:
    """(integral of momentum, integral of u, L1 norm of momentum)."""
    m = momentum(u)
    return integrate(m), integrate(u), lp_norm(m, 1)


def _alpha(m: int, depth: int) -> float:
    if m >= 2:
        return float(2**m + 2 ** (m - 2) + depth)
    return 0.0


def gronwall_rate(u: Field, m: int, n: int) -> float:
    """Envelope rate coefficient at order m within an order-n hierarchy.

    Order zero: 2 (sup|u| + 2 gsup ||u||_1).  Higher orders:
    2 [(n+3) k1 + 2 gsup ||u||_1 + alpha_m k_{m-1}] with
    alpha_m = 2^m + 2^{m-2} + n for m >= 2 and zero otherwise.
    """
    if not 0 <= m <= n:
        raise ValueError(f"order m={m} outside hierarchy range [0, {n}]")
    gs = g_sup(u.grid.kind)
    u_l1 = lp_norm(u, 1)
    if m == 0:
        return 2.0 * (u.sup() + 2.0 * gs * u_l1)
    ds = derivatives_up_to(u, max(1, m - 1))
    sups = [d.sup() for d in ds]
    k1 = max(sups[:2])
    km1 = max(sups[:m]) if m >= 2 else 0.0
    return 2.0 * ((n + 3) * k1 + 2.0 * gs * u_l1 + _alpha(m, n) * km1)


def _rates_from_scalars(sups: list[float], u_l1: float, gs: float, n: int) -> tuple[list[float], list[float]]:
    """Literal and self-indexed rate arrays from precomputed sup-norms.

    sups[j] must hold max_{i<=j} sup|d^i u| for j = 0..n.
    """
    literal = [2.0 * (sups[0] + 2.0 * gs * u_l1)]
    self_ix = [literal[0]]
    for m in range(1, n + 1):
        km1 = sups[m - 1] if m >= 2 else 0.0
        base = 2.0 * gs * u_l1
        literal.append(2.0 * ((n + 3) * sups[1] + base + _alpha(m, n) * km1))
        self_ix.append(2.0 * ((m + 3) * sups[1] + base + _alpha(m, m) * km1))
    return literal, self_ix


def _safe_log(x: float) -> float:
    return math.log(max(x, _LOG_FLOOR))


def _log_margin(log_envelope: float, value: float) -> float:
    """Envelope margin in log space; exact zero when both sides vanish."""
    if value <= _LOG_FLOOR and log_envelope <= math.log(_LOG_FLOOR) + 1.0:
        return 0.0
    return log_envelope - _safe_log(value)


def slope_bound_check(u: Field, k1_reference: float) -> CheckReport:
    """sup|u_x| must not exceed the initial momentum L1 norm."""
    margin = k1_reference - derivative(u, 1).sup()
    return CheckReport(CheckId.SLOPE_BOUND, margin, 0.0, margin >= -TOL_SLOPE, TOL_SLOPE)


def sign_preservation_check(u: Field) -> CheckReport:
    """Node minimum of the momentum; negative values flag a sign change."""
    margin = float(np.min(momentum(u).values))
    return CheckReport(CheckId.SIGN_PRESERVATION, margin, 0.0, margin >= -TOL_SIGN, TOL_SIGN)


def pointwise_inequality_sweep(u: Field, n: int, t: float = 0.0) -> list[CheckReport]:
    """Evaluate the four static bounds of the energy-hierarchy calculus.

    Two pointwise bounds (triple products and the derivative of the
    square against the energy density) plus two integral bounds (the
    integration-by-parts pairing and the Young convolution bound).
    Margins fold in a relative slack of TOL_RELATIVE.
    """
    if n < 1:
        raise ValueError("sweep order must be at least 1")
    ds = derivatives_up_to(u, n)
    vals = [d.values for d in ds]
    density = 0.5 * sum(v**2 for v in vals)
    k_bound = max(float(np.max(np.abs(v))) for v in vals[:n])
    energy_n = float(np.sum(density)) * u.grid.spacing

    reports = []

    # max over 0 <= k <= l < n of |d^k u| |d^l u| equals the squared running max
    low_max = np.abs(vals[0])
    for v in vals[1:n]:
        low_max = np.maximum(low_max, np.abs(v))
    lhs = low_max**2 * np.abs(vals[n])
    rhs = k_bound * density
    margin = float(np.min(rhs + TOL_RELATIVE * rhs - lhs))
    reports.append(
        CheckReport(CheckId.TRIPLE_PRODUCT, margin, t, margin >= -TOL_POINTWISE, TOL_POINTWISE)
    )

    lhs = np.zeros_like(vals[0])
    for k in range(n + 1):
        lhs += binom(n, k) * vals[n - k] * vals[k]
    lhs = np.abs(lhs)
    rhs = float(2**n) * density
    margin = float(np.min(rhs + TOL_RELATIVE * rhs - lhs))
    reports.append(
        CheckReport(CheckId.SQUARE_DERIVATIVE, margin, t, margin >= -TOL_POINTWISE, TOL_POINTWISE)
    )

    smoothed = one_plus_dx_helmholtz_inverse(Field(u.grid, vals[0] ** 2))
    pairing_lhs = abs(float(np.sum(vals[n] * smoothed.values)) * u.grid.spacing)
    abs_term = float(np.sum(np.abs(vals[0] * smoothed.values))) * u.grid.spacing
    pairing_rhs = abs_term + (2**n - 1) * k_bound * energy_n
    margin = pairing_rhs + TOL_RELATIVE * pairing_rhs - pairing_lhs
    reports.append(
        CheckReport(CheckId.PAIRING_INTEGRAL, margin, t, margin >= -TOL_INTEGRAL, TOL_INTEGRAL)
    )

    young_lhs = abs(float(np.sum(vals[0] * smoothed.values)) * u.grid.spacing)
    young_rhs = 2.0 * g_sup(u.grid.kind) * lp_norm(u, 1) * lp_norm(u, 2) ** 2
    margin = young_rhs + TOL_RELATIVE * young_rhs - young_lhs
    reports.append(
        CheckReport(CheckId.CONVOLUTION_INTEGRAL, margin, t, margin >= -TOL_INTEGRAL, TOL_INTEGRAL)
    )
    return reports


def gronwall_check(history: list[DiagnosticsRecord], m: int) -> CheckReport:
    """Verify energies[m] stays under its exponential envelope at every record.

    The rate integral is re-accumulated by the trapezoid rule over the
    record times; margins are log(envelope) - log(energy), so a positive
    worst margin means the envelope held everywhere.
    """
    if not history:
        raise ValueError("empty diagnostics history")
    if m < 1:
        raise ValueError("the envelope bound applies to orders m >= 1")
    base = history[0].energies[m]
    log_base = _safe_log(base)
    rate_integral = 0.0
    worst = math.inf
    worst_t = history[0].t
    prev = history[0]
    for rec in history:
        if rec.t > prev.t:
            rate_integral += 0.5 * (rec.rates[m] + prev.rates[m]) * (rec.t - prev.t)
        log_env = log_base + m * rate_integral if base > _LOG_FLOOR else math.log(_LOG_FLOOR)
        margin = _log_margin(log_env, rec.energies[m])
        if margin < worst:
            worst = margin
            worst_t = rec.t
        prev = rec
    return CheckReport(CheckId.GRONWALL, worst, worst_t, worst >= -TOL_ENVELOPE, TOL_ENVELOPE)


def h1_growth_check(history: list[DiagnosticsRecord]) -> CheckReport:
    """Squared H1 norm against its slope-driven exponential envelope."""
    if not history:
        raise ValueError("empty diagnostics history")
    base = 2.0 * history[0].energies[1]
    log_base = _safe_log(base)
    slope_integral = 0.0
    worst = math.inf
    worst_t = history[0].t
    prev = history[0]
    for rec in history:
        if rec.t > prev.t:
            slope_integral += 0.5 * (rec.ux_sup + prev.ux_sup) * (rec.t - prev.t)
        log_env = log_base + 10.0 * slope_integral if base > _LOG_FLOOR else math.log(_LOG_FLOOR)
        margin = _log_margin(log_env, 2.0 * rec.energies[1])
        if margin < worst:
            worst = margin
            worst_t = rec.t
        prev = rec
    return CheckReport(CheckId.H1_GROWTH, worst, worst_t, worst >= -TOL_ENVELOPE, TOL_ENVELOPE)


def derivative_growth_check(history: list[DiagnosticsRecord], n: int) -> CheckReport:
    """Secant growth of the top derivative L2 norm against twice rate * energy.

    Informational: the secant between records averages the true
    derivative over the interval, so the bound is compared against the
    larger endpoint value with a lenient tolerance.
    """
    worst = math.inf
    worst_t = history[0].t if history else 0.0
    if len(history) < 2:
        return CheckReport(CheckId.DERIVATIVE_GROWTH, 0.0, worst_t, True, TOL_GROWTH)

    def top_norm_sq(rec: DiagnosticsRecord) -> float:
        if n == 0:
            return 2.0 * rec.energies[0]
        return 2.0 * (rec.energies[n] - rec.energies[n - 1])

    for prev, rec in zip(history, history[1:]):
        dt = rec.t - prev.t
        if dt <= 0:
            continue
        secant = (top_norm_sq(rec) - top_norm_sq(prev)) / dt
        bound = max(2.0 * prev.rates[n] * prev.energies[n], 2.0 * rec.rates[n] * rec.energies[n])
        margin = bound + 1e-6 * abs(bound) - secant
        if margin < worst:
            worst = margin
            worst_t = rec.t
    if not math.isfinite(worst):
        worst = 0.0
    return CheckReport(CheckId.DERIVATIVE_GROWTH, worst, worst_t, worst >= -TOL_GROWTH, TOL_GROWTH)


class RunMonitor:
    """Accumulates diagnostics records and check margins along a run."""

    def __init__(self, grid, order: int, k1_reference: float, tail_threshold: float = 1e-8):
        self.grid = grid
        self.n = order
        self.k1 = k1_reference
        self.g_sup = g_sup(grid.kind)
        self.tail_threshold = tail_threshold
        self.records: list[DiagnosticsRecord] = []
        self.tail_warning = False
        self.rhs_form_deviation = 0.0
        self._rate_integrals = [0.0] * (order + 1)
        self._rate_self_integrals = [0.0] * (order + 1)
        self._slope_integral = 0.0
        self._log_base: list[float] | None = None
        self._log_base_h1 = 0.0
        self._initial: DiagnosticsRecord | None = None
        self._worst: dict[CheckId, tuple[float, float]] = {}

    def _note(self, check: CheckId, margin: float, t: float) -> None:
        cur = self._worst.get(check)
        if cur is None or margin < cur[0]:
            self._worst[check] = (margin, t)

    def observe(self, t: float, u: Field, rhs_deviation: float | None = None) -> DiagnosticsRecord:
        n = self.n
        ds = derivatives_up_to(u, max(n, 2))
        vals = [d.values for d in ds]
        spacing = self.grid.spacing

        energies = []
        acc = 0.0
        for m in range(n + 1):
            acc += 0.5 * float(np.sum(vals[m] ** 2)) * spacing
            energies.append(acc)
        running_sups = []
        peak = 0.0
        for m in range(n + 1):
            peak = max(peak, float(np.max(np.abs(vals[m]))))
            running_sups.append(peak)

        u_l1 = float(np.sum(np.abs(vals[0]))) * spacing
        u_int = float(np.sum(vals[0])) * spacing
        mom_vals = vals[0] - vals[2]
        m_int = float(np.sum(mom_vals)) * spacing
        m_l1 = float(np.sum(np.abs(mom_vals))) * spacing
        m_min = float(np.min(mom_vals))
        ux_sup = float(np.max(np.abs(vals[1])))

        rates, rates_self = _rates_from_scalars(running_sups, u_l1, self.g_sup, n)

        if self._initial is None:
            self._log_base = [_safe_log(e) for e in energies]
            self._log_base_h1 = _safe_log(2.0 * energies[1]) if n >= 1 else 0.0
        else:
            prev = self.records[-1]
            dt = t - prev.t
            for m in range(n + 1):
                self._rate_integrals[m] += 0.5 * (rates[m] + prev.rates[m]) * dt
                self._rate_self_integrals[m] += 0.5 * (rates_self[m] + prev.rates_self[m]) * dt
            self._slope_integral += 0.5 * (ux_sup + prev.ux_sup) * dt

        assert self._log_base is not None
        log_envs = [self._log_base[m] + m * self._rate_integrals[m] for m in range(n + 1)]
        log_envs_self = [self._log_base[m] + m * self._rate_self_integrals[m] for m in range(n + 1)]
        envelopes = tuple(float(np.exp(min(le, 709.0)) if le < 709.0 else np.inf) for le in log_envs)
        envelopes_self = tuple(
            float(np.exp(min(le, 709.0)) if le < 709.0 else np.inf) for le in log_envs_self
        )
        log_env_h1 = self._log_base_h1 + 10.0 * self._slope_integral
        h1_env = float(np.exp(log_env_h1)) if log_env_h1 < 709.0 else math.inf

        violations: list[tuple[str, float]] = []

        def check(check_id: CheckId, margin: float) -> None:
            self._note(check_id, margin, t)
            if margin < -TOLERANCES[check_id] and check_id in ENFORCED:
                violations.append((check_id.value, margin))

        if self._initial is not None:
            check(CheckId.MOMENTUM_CONSERVATION, -abs(m_int - self._initial.m_int))
            check(CheckId.MASS_CONSERVATION, -abs(u_int - self._initial.u_int))
        else:
            check(CheckId.MOMENTUM_CONSERVATION, 0.0)
            check(CheckId.MASS_CONSERVATION, 0.0)
        check(CheckId.SLOPE_BOUND, self.k1 - ux_sup)
        check(CheckId.SIGN_PRESERVATION, m_min)
        initial = self._initial
        for m in range(1, n + 1):
            base = energies[m] if initial is None else initial.energies[m]
            log_env = log_envs[m] if base > _LOG_FLOOR else math.log(_LOG_FLOOR)
            check(CheckId.GRONWALL, _log_margin(log_env, energies[m]))
        if n >= 1:
            base_h1 = 2.0 * (energies[1] if initial is None else initial.energies[1])
            log_env = log_env_h1 if base_h1 > _LOG_FLOOR else math.log(_LOG_FLOOR)
            check(CheckId.H1_GROWTH, _log_margin(log_env, 2.0 * energies[1]))
        for report in pointwise_inequality_sweep(u, n, t):
            check(report.check_id, report.worst_margin)

        if self.grid.kind.value == "line":
            edge = max(1, self.grid.n_points // 20)
            tail = max(float(np.max(np.abs(vals[0][:edge]))), float(np.max(np.abs(vals[0][-edge:]))))
            if tail >= self.tail_threshold:
                self.tail_warning = True

        if rhs_deviation is not None:
            self.rhs_form_deviation = max(self.rhs_form_deviation, rhs_deviation)

        record = DiagnosticsRecord(
            t=t,
            energies=tuple(energies),
            sup_norms=tuple(running_sups[:n]),
            rates=tuple(rates),
            rates_self=tuple(rates_self),
            u_l1=u_l1,
            u_int=u_int,
            m_int=m_int,
            m_l1=m_l1,
            m_min=m_min,
            ux_sup=ux_sup,
            envelopes=envelopes,
            envelopes_self=envelopes_self,
            h1_envelope=h1_env,
            violations=tuple(violations),
        )
        if self._initial is None:
            self._initial = record
        self.records.append(record)
        return record

    def finalize(self) -> list[CheckReport]:
        reports = []
        for check_id in CheckId:
            if check_id is CheckId.DERIVATIVE_GROWTH:
                reports.append(derivative_growth_check(self.records, self.n))
                continue
            margin, t = self._worst.get(check_id, (0.0, 0.0))
            tol = TOLERANCES[check_id]
            reports.append(CheckReport(check_id, margin, t, margin >= -tol, tol))
        return reports
