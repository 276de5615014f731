"""Relaxation-time growth plot: ln t_rel against inverse temperature for one
or more study CSVs, with a least-squares line and its slope annotated."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import PlotsError, read_arrhenius


def plot_arrhenius(csv_paths, output):
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in csv_paths:
        data = read_arrhenius(path)
        beta, ln_t = data["beta"], data["ln_t_rel"]
        label = Path(path).stem
        pts = ax.plot(beta, ln_t, "o", label=label)[0]
        if beta.size >= 2:
            slope, intercept = np.polyfit(beta, ln_t, 1)
            grid = np.linspace(beta.min(), beta.max(), 50)
            ax.plot(grid, slope * grid + intercept, "--",
                    color=pts.get_color(), linewidth=1,
                    label=f"{label} fit: slope {slope:.3f}")
    ax.set_xlabel("inverse temperature")
    ax.set_ylabel("ln relaxation time")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=120)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="ln t_rel against beta with fitted slopes")
    parser.add_argument("csvs", nargs="+")
    parser.add_argument("-o", "--output", required=True)
    args = parser.parse_args(argv)
    try:
        fig = plot_arrhenius(args.csvs, args.output)
        plt.close(fig)
    except PlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
