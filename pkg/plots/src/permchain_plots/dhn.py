"""Mixing-time scatter for projected uniform walks: per-trial t_mix against
the state count, with the logarithmic bound curve emitted by the study."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import PlotsError, read_dhn


def plot_dhn(csv_paths, output):
    fig, ax = plt.subplots(figsize=(6, 4))
    ns, t_mixes = [], []
    bounds = {}
    for path in csv_paths:
        data = read_dhn(path)
        ns.append(data["n"])
        t_mixes.append(data["t_mix"])
        for n, b in zip(data["n"], data["bound"]):
            bounds[float(n)] = float(b)
    n_all = np.concatenate(ns)
    t_all = np.concatenate(t_mixes)
    jitter = (np.arange(t_all.size) % 7 - 3) * 0.01 * n_all
    ax.scatter(n_all + jitter, t_all, s=14, alpha=0.6, label="t_mix per draw")
    xs = np.array(sorted(bounds))
    ax.plot(xs, [bounds[x] for x in xs], "r--", label="log-growth bound")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("states")
    ax.set_ylabel("mixing time (TV < 1/4)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output, dpi=120)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="mixing-time scatter with the growth bound")
    parser.add_argument("csvs", nargs="+")
    parser.add_argument("-o", "--output", required=True)
    args = parser.parse_args(argv)
    try:
        fig = plot_dhn(args.csvs, args.output)
        plt.close(fig)
    except PlotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
