"""Three-by-three comparison grid for spin experiments: magnetization traces
(top row), fitted magnetization densities (middle row, Gaussian KDE with
Scott's bandwidth), and energy traces (bottom row). Each column compares the
baseline sampler (blue) with one projection sampler (orange)."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy import stats

from .io import PlotsError, read_trace

BASE_COLOR = "tab:blue"
PROJ_COLOR = "tab:orange"


@dataclass(frozen=True)
class FigureSpec:
    """Inputs of one grid: per column a (baseline CSV, projection CSV) pair
    with its pair of series labels, and the image output path."""

    columns: tuple  # ((base_csv, proj_csv), ...)
    labels: tuple   # ((base_label, proj_label), ...)
    output: str
    rows: int = 3

    def __post_init__(self):
        if len(self.columns) != len(self.labels):
            raise PlotsError("one label pair per column is required")
        if self.rows != 3:
            raise PlotsError("the grid has exactly three rows")


def _density_panel(ax, values: np.ndarray, color: str, label: str) -> None:
    """KDE curve; a single bar stands in when the data are degenerate."""
    spread = float(values.max() - values.min()) if values.size else 0.0
    if values.size < 2 or spread < 1e-12:
        center = float(values[0]) if values.size else 0.0
        ax.bar([center], [1.0], width=0.05, color=color, alpha=0.6, label=label)
        return
    kde = stats.gaussian_kde(values)  # Scott's rule bandwidth
    grid = np.linspace(values.min() - 0.05, values.max() + 0.05, 256)
    ax.plot(grid, kde(grid), color=color, label=label)


def plot_nine_panel(spec: FigureSpec):
    """Render the grid and save it; returns the figure for inspection."""
    traces = []
    for base_csv, proj_csv in spec.columns:
        traces.append((read_trace(base_csv), read_trace(proj_csv)))
    ncols = len(spec.columns)
    fig, axes = plt.subplots(3, ncols, figsize=(4 * ncols, 9), squeeze=False)
    for col, ((base, proj), (base_label, proj_label)) in enumerate(
            zip(traces, spec.labels)):
        ax = axes[0][col]
        ax.plot(base["step"], base["magnetization"], color=BASE_COLOR,
                label=base_label, linewidth=0.8)
        ax.plot(proj["step"], proj["magnetization"], color=PROJ_COLOR,
                label=proj_label, linewidth=0.8, alpha=0.85)
        ax.set_xlabel("step")
        ax.set_ylabel("magnetization")
        ax.legend(loc="upper right", fontsize=8)

        ax = axes[1][col]
        _density_panel(ax, base["magnetization"], BASE_COLOR, base_label)
        _density_panel(ax, proj["magnetization"], PROJ_COLOR, proj_label)
        ax.set_xlabel("magnetization")
        ax.set_ylabel("density")
        ax.legend(loc="upper right", fontsize=8)

        ax = axes[2][col]
        ax.plot(base["step"], base["hamiltonian"], color=BASE_COLOR,
                label=base_label, linewidth=0.8)
        ax.plot(proj["step"], proj["hamiltonian"], color=PROJ_COLOR,
                label=proj_label, linewidth=0.8, alpha=0.85)
        ax.set_xlabel("step")
        ax.set_ylabel("energy")
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=120)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="3x3 sampler comparison grid from trace CSV files")
    parser.add_argument("csvs", nargs=6,
                        help="three (baseline, projection) CSV pairs, in order")
    parser.add_argument("-o", "--output", required=True)
    parser.add_argument("--labels", default="standard,fixed Q,standard,adaptive,"
                                            "standard,exploratory",
                        help="six comma-separated series labels")
    args = parser.parse_args(argv)
    labels = [s.strip() for s in args.labels.split(",")]
    if len(labels) != 6:
        print("error: exactly six labels are required", file=sys.stderr)
        return 2
    spec = FigureSpec(
        columns=tuple((args.csvs[2 * i], args.csvs[2 * i + 1]) for i in range(3)),
        labels=tuple((labels[2 * i], labels[2 * i + 1]) for i in range(3)),
        output=args.output)
    try:
        fig = plot_nine_panel(spec)
        plt.close(fig)
    except PlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
