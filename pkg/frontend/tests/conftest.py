import numpy as np
import pytest


def _records_header(order=2):
    cols = ["t"]
    cols += [f"I_{m}" for m in range(order + 1)]
    cols += [f"k_{m}" for m in range(order)]
    cols += [f"kappa_{m}" for m in range(order + 1)]
    cols += ["u_L1", "u_int", "m_int", "m_L1", "m_min", "ux_sup"]
    cols += [f"env_{m}" for m in range(order + 1)]
    cols += ["h1_env"]
    cols += [f"kappa_alt_{m}" for m in range(order + 1)]
    cols += [f"env_alt_{m}" for m in range(order + 1)]
    return cols


def write_synthetic_run(run_dir, *, violate_envelope=False, corrupt_rows=0,
                        n_snapshots=3, n_nodes=16):
    """Small run directory with schema-conforming CSVs and tame values."""
    run_dir.mkdir(parents=True, exist_ok=True)
    header = _records_header()
    lines = [",".join(header)]
    times = [0.0, 0.5, 1.0, 1.5]
    for i, t in enumerate(times):
        energies = [0.1 + 0.01 * i, 0.2 + 0.01 * i, 0.4 + 0.01 * i]
        envs = [e * (1.5 + i) for e in energies]
        if violate_envelope and i == 2:
            envs[1] = energies[1] * 0.5
        row = [t] + energies
        row += [1.0, 2.0]                      # k_0, k_1
        row += [3.0, 4.0, 5.0]                 # kappa
        row += [0.3, 0.25, 0.25, 0.25, 1e-9, 0.05]  # u_L1 u_int m_int m_L1 m_min ux_sup
        row += envs
        row += [2.0 * envs[1]]                 # h1_env
        row += [3.0, 3.5, 4.5]                 # kappa_alt
        row += [e * 1.2 for e in envs]         # env_alt
        lines.append(",".join(repr(float(v)) for v in row))
    for k in range(corrupt_rows):
        lines.append("not,a,number" + ",x" * (len(header) - 3))
    (run_dir / "records.csv").write_text("\n".join(lines) + "\n")

    x = np.arange(n_nodes) / n_nodes
    snap_lines = ["t,x,u,m"]
    for j in range(n_snapshots):
        t = 0.5 * j
        u = 0.1 * np.sin(2 * np.pi * (x - 0.05 * j))
        m = 0.2 * np.cos(2 * np.pi * (x - 0.05 * j))
        for i in range(n_nodes):
            snap_lines.append(
                f"{float(t)!r},{float(x[i])!r},{float(u[i])!r},{float(m[i])!r}"
            )
    (run_dir / "snapshots.csv").write_text("\n".join(snap_lines) + "\n")
    return run_dir


@pytest.fixture
def synthetic_run(tmp_path):
    return write_synthetic_run(tmp_path / "run")


@pytest.fixture
def violating_run(tmp_path):
    return write_synthetic_run(tmp_path / "bad_run", violate_envelope=True)
