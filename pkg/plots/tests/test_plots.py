"""Figure structure, input validation, and the end-to-end path from real
sampler runs produced through the toolkit's command line."""

import subprocess
import sys

import matplotlib.pyplot as plt
import numpy as np
import pytest

from permchain_plots import (
    FigureSpec,
    PlotsError,
    plot_arrhenius,
    plot_dhn,
    plot_nine_panel,
)

SPIN_CONFIG = """
model = ising
d = 10
beta = 2.0
steps = 3000
seed = 5
sampler = {sampler}
record_stride = 10
"""


def run_cli(args, cwd):
    return subprocess.run([sys.executable, "-m", "permchain.cli", *args],
                          cwd=cwd, capture_output=True, text=True)


@pytest.fixture(scope="module")
def spin_outputs(tmp_path_factory):
    """Real trace CSVs from three experiments against the baseline sampler."""
    out = tmp_path_factory.mktemp("runs")
    for sampler in ("fixed_q", "adaptive", "exploratory"):
        cfg = out / f"{sampler}.cfg"
        extra = "explore_steps = 2000\n" if sampler == "exploratory" else ""
        cfg.write_text(SPIN_CONFIG.format(sampler=sampler) + extra)
        proc = run_cli(["--out-dir", str(out / sampler), "spin", str(cfg)], out)
        assert proc.returncode == 0, proc.stderr
    return out


def synthetic_trace(path, steps=50, seed=0, constant=None):
    rng = np.random.default_rng(seed)
    with open(path, "w") as fh:
        fh.write("step,magnetization,hamiltonian\n")
        m = 0.0
        for t in range(1, steps + 1):
            m = constant if constant is not None else float(np.clip(
                m + rng.normal(0, 0.1), -1, 1))
            fh.write(f"{t},{m},{rng.integers(0, 20)}\n")
    return path


class TestNinePanel:
    def test_grid_structure_from_real_runs(self, spin_outputs, tmp_path):
        columns, labels = [], []
        for sampler in ("fixed_q", "adaptive", "exploratory"):
            base = spin_outputs / sampler / "trace_ising_standard.csv"
            proj = spin_outputs / sampler / f"trace_ising_{sampler}.csv"
            columns.append((str(base), str(proj)))
            labels.append(("standard", sampler))
        spec = FigureSpec(columns=tuple(columns), labels=tuple(labels),
                          output=str(tmp_path / "grid.png"))
        fig = plot_nine_panel(spec)
        try:
            assert len(fig.axes) == 9
            for ax in fig.axes:
                legend = ax.get_legend()
                assert legend is not None
                assert len(legend.get_texts()) == 2
        finally:
            plt.close(fig)
        assert (tmp_path / "grid.png").stat().st_size > 0

    def test_missing_column_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("step,magnetization\n1,0.5\n")
        good = synthetic_trace(tmp_path / "good.csv")
        spec = FigureSpec(columns=((str(bad), str(good)),),
                          labels=(("a", "b"),),
                          output=str(tmp_path / "x.png"))
        with pytest.raises(PlotsError):
            plot_nine_panel(spec)

    def test_empty_trace_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("step,magnetization,hamiltonian\n")
        good = synthetic_trace(tmp_path / "good.csv")
        spec = FigureSpec(columns=((str(empty), str(good)),),
                          labels=(("a", "b"),),
                          output=str(tmp_path / "x.png"))
        with pytest.raises(PlotsError):
            plot_nine_panel(spec)

    def test_degenerate_series_uses_bar_fallback(self, tmp_path):
        flat = synthetic_trace(tmp_path / "flat.csv", constant=0.25)
        wiggly = synthetic_trace(tmp_path / "wiggly.csv", seed=3)
        spec = FigureSpec(columns=((str(flat), str(wiggly)),),
                          labels=(("flat", "wiggly"),),
                          output=str(tmp_path / "x.png"))
        fig = plot_nine_panel(spec)
        try:
            density_ax = fig.axes[1]
            assert len(density_ax.patches) >= 1  # the stand-in bar
        finally:
            plt.close(fig)

    def test_single_point_trace(self, tmp_path):
        single = synthetic_trace(tmp_path / "one.csv", steps=1)
        other = synthetic_trace(tmp_path / "two.csv", steps=1, seed=9)
        spec = FigureSpec(columns=((str(single), str(other)),),
                          labels=(("a", "b"),),
                          output=str(tmp_path / "x.png"))
        fig = plot_nine_panel(spec)
        plt.close(fig)

    def test_cli_exit_codes(self, tmp_path):
        from permchain_plots.nine_panel import main

        good = [str(synthetic_trace(tmp_path / f"t{i}.csv", seed=i))
                for i in range(6)]
        out = str(tmp_path / "ok.png")
        assert main([*good, "-o", out]) == 0
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n")
        assert main([str(bad), *good[1:], "-o", out]) == 1

    def test_deterministic_bytes(self, tmp_path):
        csvs = [str(synthetic_trace(tmp_path / f"d{i}.csv", seed=i))
                for i in range(2)]
        spec_a = FigureSpec(columns=((csvs[0], csvs[1]),),
                            labels=(("a", "b"),),
                            output=str(tmp_path / "a.png"))
        spec_b = FigureSpec(columns=((csvs[0], csvs[1]),),
                            labels=(("a", "b"),),
                            output=str(tmp_path / "b.png"))
        plt.close(plot_nine_panel(spec_a))
        plt.close(plot_nine_panel(spec_b))
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


class TestArrhenius:
    def test_real_study_output(self, tmp_path):
        proc = run_cli(["--out-dir", str(tmp_path), "bimodal", "--J", "4",
                        "--beta-grid", "1,2,3,4"], tmp_path)
        assert proc.returncode == 0, proc.stderr
        fig = plot_arrhenius([str(tmp_path / "arrhenius_standard.csv"),
                              str(tmp_path / "arrhenius_projected.csv")],
                             str(tmp_path / "arr.png"))
        try:
            labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
            assert any("slope" in t for t in labels)
        finally:
            plt.close(fig)

    def test_empty_csv_rejected(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("")
        with pytest.raises(PlotsError):
            plot_arrhenius([str(bad)], str(tmp_path / "x.png"))


class TestDHN:
    def test_real_study_output(self, tmp_path):
        proc = run_cli(["--out-dir", str(tmp_path), "dhn", "--n", "32",
                        "--trials", "4", "--seed", "2"], tmp_path)
        assert proc.returncode == 0, proc.stderr
        fig = plot_dhn([str(tmp_path / "dhn.csv")], str(tmp_path / "dhn.png"))
        try:
            assert len(fig.axes[0].collections) >= 1  # the scatter
            assert len(fig.axes[0].lines) >= 1  # the bound curve
        finally:
            plt.close(fig)

    def test_wrong_header_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(PlotsError):
            plot_dhn([str(bad)], str(tmp_path / "x.png"))
