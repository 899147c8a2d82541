from pathlib import Path

import pytest

from nonlocalflow_plots import check_envelopes, read_records
from nonlocalflow_plots.cli import render
from nonlocalflow_plots.figures import FIGURE_NAMES, PlotJob
from conftest import write_synthetic_run


class TestRender:
    def test_all_figures_render(self, synthetic_run):
        report = render(PlotJob(run_dir=synthetic_run))
        stems = sorted(p.stem for p in report.written)
        assert stems == sorted(
            ["energy_m0", "energy_m1", "energy_m2", "drift", "slope",
             "margins", "waterfall", "momentum_heatmap"]
        )
        assert report.envelope_ok
        for path in report.written:
            assert path.stat().st_size > 0

    def test_svg_format(self, synthetic_run, tmp_path):
        job = PlotJob(run_dir=synthetic_run, figures=("drift",),
                      out_dir=tmp_path / "svg_out", image_format="svg")
        report = render(job)
        assert report.written[0].suffix == ".svg"

    def test_default_out_dir_is_figures_subdir(self, synthetic_run):
        report = render(PlotJob(run_dir=synthetic_run, figures=("slope",)))
        assert report.written[0].parent == synthetic_run / "figures"

    def test_inputs_unchanged(self, synthetic_run):
        before = (synthetic_run / "records.csv").read_bytes()
        render(PlotJob(run_dir=synthetic_run))
        assert (synthetic_run / "records.csv").read_bytes() == before

    def test_single_snapshot_waterfall(self, tmp_path):
        run = write_synthetic_run(tmp_path / "run", n_snapshots=1)
        report = render(PlotJob(run_dir=run, figures=("waterfall",)))
        assert len(report.written) == 1

    def test_zero_run_renders(self, tmp_path):
        # degenerate flat-line data must still produce figures
        run = tmp_path / "run"
        run.mkdir()
        header = "t,I_0,I_1,k_0,kappa_0,kappa_1,u_L1,u_int,m_int,m_L1,m_min,ux_sup,env_0,env_1,h1_env"
        rows = [header] + [f"{t},0,0,0,0,0,0,0,0,0,0,0,0,0,0" for t in (0.0, 1.0)]
        (run / "records.csv").write_text("\n".join(rows) + "\n")
        (run / "snapshots.csv").write_text("t,x,u,m\n0.0,0.0,0.0,0.0\n0.0,0.5,0.0,0.0\n")
        report = render(PlotJob(run_dir=run))
        assert report.envelope_ok
        assert len(report.written) == 7  # energy_m0, energy_m1 + 4 others + heatmap

    def test_corrupt_rows_counted(self, tmp_path):
        run = write_synthetic_run(tmp_path / "run", corrupt_rows=3)
        report = render(PlotJob(run_dir=run, figures=("drift",)))
        assert report.skipped_rows == 3

    def test_bit_stable_output(self, synthetic_run, tmp_path):
        for fmt in ("png", "svg"):
            a = render(PlotJob(synthetic_run, ("energy", "margins"), tmp_path / f"a_{fmt}", fmt))
            b = render(PlotJob(synthetic_run, ("energy", "margins"), tmp_path / f"b_{fmt}", fmt))
            for pa, pb in zip(sorted(a.written), sorted(b.written)):
                assert pa.read_bytes() == pb.read_bytes(), (fmt, pa.name)


class TestEnvelopeRecheck:
    def test_clean_data_passes(self, synthetic_run):
        records = read_records(synthetic_run)
        assert check_envelopes(records) == []

    def test_violation_detected(self, violating_run):
        records = read_records(violating_run)
        failures = check_envelopes(records)
        assert failures and failures[0][0] == 1
        report = render(PlotJob(run_dir=violating_run, figures=("energy",)))
        assert not report.envelope_ok

    def test_order_zero_not_asserted(self, tmp_path):
        # env_0 below I_0 must not fail the re-check
        run = tmp_path / "run"
        run.mkdir()
        header = "t,I_0,I_1,u_int,m_int,m_L1,m_min,ux_sup,env_0,env_1,h1_env"
        rows = [header, "0.0,1.0,2.0,0,0,0,0,0,0.5,4.0,8.0"]
        (run / "records.csv").write_text("\n".join(rows) + "\n")
        records = read_records(run)
        assert check_envelopes(records) == []
