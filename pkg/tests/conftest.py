import time

import numpy as np
import pytest

import nonlocalflow as nf


@pytest.fixture(scope="session")
def rng_factory():
    def make(seed=0):
        return np.random.default_rng(seed)

    return make


def _standard_config(t_end=5.0):
    return nf.SolverConfig(
        t_end=t_end,
        dt_initial=1e-3,
        error_tolerance=1e-9,
        dt_min=1e-8,
        max_order=3,
        snapshot_stride=100,
        monitor_stride=10,
    )


@pytest.fixture(scope="session")
def standard_periodic_run():
    """Criterion-7 instance: gaussian momentum, periodic N=512, t_end=5."""
    grid = nf.make_grid(nf.DomainKind.PERIODIC, 512)
    spec = nf.InitialDataSpec(nf.GaussianMomentum(1.0, 0.5, 0.05), grid)
    u0, m0 = nf.build_initial_field(spec)
    start = time.monotonic()
    result = nf.simulate(u0, _standard_config())
    elapsed = time.monotonic() - start
    return {"grid": grid, "u0": u0, "m0": m0, "result": result, "elapsed": elapsed}


@pytest.fixture(scope="session")
def line_run_2048():
    """Criterion-8 instance as stated: same data on the line, N=2048, L=20."""
    grid = nf.make_grid(nf.DomainKind.LINE, 2048, 20.0)
    spec = nf.InitialDataSpec(nf.GaussianMomentum(1.0, 0.0, 0.05), grid)
    u0, m0 = nf.build_initial_field(spec)
    start = time.monotonic()
    result = nf.simulate(u0, _standard_config())
    elapsed = time.monotonic() - start
    return {"grid": grid, "u0": u0, "m0": m0, "result": result, "elapsed": elapsed}


@pytest.fixture(scope="session")
def line_run_4096():
    """Resolution companion to the criterion-8 instance (not part of the criterion)."""
    grid = nf.make_grid(nf.DomainKind.LINE, 4096, 20.0)
    spec = nf.InitialDataSpec(nf.GaussianMomentum(1.0, 0.0, 0.05), grid)
    u0, m0 = nf.build_initial_field(spec)
    result = nf.simulate(u0, _standard_config())
    return {"grid": grid, "u0": u0, "m0": m0, "result": result}
