"""End-to-end: simulate via the simulator CLI, then render every figure.

Exercises the full file contract: the gaussian-momentum regularity run is
produced by `nonlocal-flow run` in a scratch directory and consumed here
purely through its CSV output.  Skipped when the simulator CLI is not
installed.
"""

import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from nonlocalflow_plots import check_envelopes, read_records
from nonlocalflow_plots.cli import main

SIMULATOR = shutil.which("nonlocal-flow")

CONFIG = """
[grid]
domain = "periodic"
n_points = 512

[initial]
kind = "gaussian_momentum"
amplitude = 1.0
center = 0.5
width = 0.05

[solver]
t_end = 5.0
dt_initial = 1e-3
error_tolerance = 1e-9
max_order = 3
snapshot_stride = 100
monitor_stride = 10

[output]
directory = "{out_dir}"
"""


@pytest.fixture(scope="session")
def regularity_run_dir(tmp_path_factory):
    if SIMULATOR is None:
        pytest.skip("nonlocal-flow CLI not installed")
    root = tmp_path_factory.mktemp("sim")
    out_dir = root / "run"
    config = root / "run.toml"
    config.write_text(CONFIG.format(out_dir=out_dir))
    proc = subprocess.run(
        [SIMULATOR, "run", str(config)], capture_output=True, text=True, timeout=600
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    return out_dir


class TestAgainstSimulatorOutput:
    def test_all_figures_render_and_recheck_confirms(self, regularity_run_dir, capsys):
        out = regularity_run_dir.parent / "figures"
        code = main([str(regularity_run_dir), "--out", str(out)])
        captured = capsys.readouterr()
        assert code == 0, captured.err
        assert "envelope re-check: energies stay below their envelopes" in captured.out
        names = sorted(p.name for p in out.iterdir())
        assert names == sorted([
            "energy_m0.png", "energy_m1.png", "energy_m2.png", "energy_m3.png",
            "drift.png", "slope.png", "margins.png", "waterfall.png",
            "momentum_heatmap.png",
        ])
        for name in names:
            assert (out / name).stat().st_size > 1000

    def test_recheck_values_directly(self, regularity_run_dir):
        records = read_records(regularity_run_dir)
        assert records.orders == 3
        assert check_envelopes(records) == []
