"""Pseudospectral solver and invariant-verification harness for the
nonlocal evolution equation u_t - 2 u u_x = d/dx G (u^2 + (u^2)_x) on the
unit circle and on a truncated line, where G inverts 1 - d^2/dx^2."""

from .diagnostics import (
    CheckId,
    CheckReport,
    DiagnosticsRecord,
    conserved_quantities,
    gronwall_check,
    gronwall_rate,
    h1_growth_check,
    momentum,
    pointwise_inequality_sweep,
    sign_preservation_check,
    slope_bound_check,
)
from .errors import ConfigError, NonFiniteFieldError, StepUnderflowError
from .evolution import (
    SimulationResult,
    SolverConfig,
    Termination,
    adaptive_step,
    equation_residual_third_order,
    rhs,
    rhs_convolution_form,
    rk4_step,
    simulate,
)
from .fields import (
    DomainKind,
    EnergyProfile,
    Field,
    Grid1D,
    binom,
    derivative,
    derivative_sup_max,
    energy,
    energy_density,
    energy_profile,
    integrate,
    leibniz_square_derivative,
    lp_norm,
    make_grid,
    random_band_limited,
    random_nonneg_band_limited,
)
from .initial_data import (
    CosineBumpMomentum,
    ExplicitFile,
    GaussianMomentum,
    InitialDataSpec,
    MollifiedPeakon,
    RandomNonnegMomentum,
    build_initial_field,
)
from .kernel import (
    KernelTable,
    convolve_direct,
    dx_helmholtz_inverse,
    g_sup,
    green,
    green_derivative,
    helmholtz_inverse,
    kernel_table,
    one_plus_dx_helmholtz_inverse,
    operator_identity_residual,
)

__version__ = "0.1.0"
