"""Validated readers for the sampler CSV formats. These scripts render what
the toolkit emitted; they never recompute its statistics."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

TRACE_HEADER = ["step", "magnetization", "hamiltonian"]
ARRHENIUS_HEADER = ["beta", "gap", "t_rel", "ln_t_rel"]
DHN_HEADER = ["trial", "n", "t_mix", "bound"]


class PlotsError(Exception):
    pass


def _read_csv(path, header: list[str]) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise PlotsError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise PlotsError(f"{path}: empty file")
        if first != header:
            raise PlotsError(f"{path}: expected header {','.join(header)}, "
                             f"found {','.join(first)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise PlotsError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise PlotsError(f"{path}:{lineno}: non-numeric value")
    if not rows:
        raise PlotsError(f"{path}: no data rows")
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(header)}


def read_trace(path) -> dict[str, np.ndarray]:
    return _read_csv(path, TRACE_HEADER)


def read_arrhenius(path) -> dict[str, np.ndarray]:
    return _read_csv(path, ARRHENIUS_HEADER)


def read_dhn(path) -> dict[str, np.ndarray]:
    return _read_csv(path, DHN_HEADER)
