"""Eigen-analysis and variance functionals for reversible kernels: spectral
reports (SLEM, gap, relaxation and eigentime), the fundamental matrix,
asymptotic variances, and exact worst-start total-variation mixing times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .chains import _as_matrix, _as_prob, is_reversible
from .errors import NotCentered, NotReversible, Singular, StepBudgetExceeded

PSD_EIGEN_TOL = -1e-10


@dataclass(frozen=True)
class SpectrumReport:
    """Real spectrum of a reversible kernel, sorted descending, with the
    derived gap, relaxation time, and eigentime."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        lam = self.eigenvalues
        if abs(lam[0] - 1.0) > 1e-10:
            raise ArithmeticError(f"leading eigenvalue {lam[0]} is not 1")
        if np.any(np.abs(lam) > 1.0 + 1e-10):
            raise ArithmeticError("eigenvalue outside the unit interval")

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def slem(self) -> float:
        return max(self.lambda2, abs(self.lambda_min))

    @property
    def gap(self) -> float:
        return 1.0 - self.lambda2

    @property
    def relaxation_time(self) -> float:
        return math.inf if self.gap <= 0.0 else 1.0 / self.gap

    @property
    def eigentime(self) -> float:
        tail = 1.0 - self.eigenvalues[1:]
        if np.any(tail <= 0.0):
            return math.inf
        return float(np.sum(1.0 / tail))

    @property
    def positive_semidefinite(self) -> bool:
        return self.lambda_min >= PSD_EIGEN_TOL


def spectrum(P, pi, tol: float = 1e-10) -> SpectrumReport:
    """Eigenvalues of a reversible kernel via the symmetrized form
    D^{1/2} P D^{-1/2}; non-reversible inputs are rejected so the report
    stays real-valued."""
    m = _as_matrix(P)
    p = _as_prob(pi)
    rep = is_reversible(m, p, tol=tol)
    if not rep.reversible:
        raise NotReversible(
            f"detailed balance violated by {rep.max_violation:.3e} at {rep.worst_pair}")
    root = np.sqrt(p)
    s = root[:, None] * m / root[None, :]
    s = 0.5 * (s + s.T)
    lam = np.linalg.eigvalsh(s)[::-1]
    return SpectrumReport(np.ascontiguousarray(lam))


def general_eigenvalues(P) -> np.ndarray:
    """Possibly-complex spectrum of an arbitrary kernel; used for Sylvester
    overlap checks, not for the reversible report."""
    return np.linalg.eigvals(_as_matrix(P))


@dataclass(frozen=True)
class FundamentalMatrix:
    z: np.ndarray
    residual: float


def fundamental(P, pi, residual_tol: float = 1e-9) -> FundamentalMatrix:
    """Inverse of I - (P - Pi) for an ergodic kernel, where Pi is the rank-one
    stationary matrix."""
    m = _as_matrix(P)
    p = _as_prob(pi)
    n = m.shape[0]
    a = np.eye(n) - (m - np.tile(p, (n, 1)))
    try:
        z = np.linalg.solve(a, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise Singular(f"kernel is not ergodic: {exc}") from exc
    residual = float(np.max(np.abs(z @ a - np.eye(n))))
    if not np.isfinite(residual) or residual > residual_tol:
        raise Singular(f"fundamental-matrix residual {residual:.3e}")
    return FundamentalMatrix(z, residual)


def asymptotic_variance(f, P, pi, center_tol: float = 1e-10) -> float:
    """Long-run variance per step of the partial sums of a centered f:
    2 <f, Zf>_pi - <f, f>_pi."""
    v = np.asarray(f, dtype=float)
    p = _as_prob(pi)
    mean = float(p @ v)
    if abs(mean) > center_tol:
        raise NotCentered(f"pi(f) = {mean:.3e}")
    z = fundamental(P, p).z
    return float(2.0 * (p * v) @ (z @ v) - (p * v) @ v)


def worst_case_av(P, pi) -> float:
    """Supremum of the asymptotic variance over unit-norm centered functions,
    (1 + lambda_2) / (1 - lambda_2)."""
    lam2 = spectrum(P, pi).lambda2
    if lam2 >= 1.0:
        return math.inf
    return (1.0 + lam2) / (1.0 - lam2)


def average_case_av(P, pi) -> float:
    """Surface average of the asymptotic variance, computed through the trace
    of the fundamental matrix: 2 Tr(Z) / (n - 1) - 1."""
    m = _as_matrix(P)
    n = m.shape[0]
    z = fundamental(m, pi).z
    return 2.0 / (n - 1) * float(np.trace(z)) - 1.0


@dataclass(frozen=True)
class AsymptoticVarianceReport:
    per_function: dict
    worst_case: float
    average_case: float


def variance_report(P, pi, functions: dict | None = None) -> AsymptoticVarianceReport:
    per = {}
    if functions:
        for name, f in functions.items():
            per[name] = asymptotic_variance(f, P, pi)
    return AsymptoticVarianceReport(per, worst_case_av(P, pi), average_case_av(P, pi))


_SPARSE_DENSITY_CUTOFF = 0.25


def mixing_time(P, pi, eps: float, max_steps: int = 100_000) -> int:
    """Exact worst-start total-variation mixing time: the first step count at
    which every start state's distribution is within eps of pi.

    All n start distributions are iterated together; sparse kernels are
    multiplied in compressed form.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    m = _as_matrix(P)
    p = _as_prob(pi)
    n = m.shape[0]
    density = np.count_nonzero(m) / m.size
    op = sp.csr_array(m) if density < _SPARSE_DENSITY_CUTOFF else m
    dist = np.eye(n)
    for t in range(1, max_steps + 1):
        dist = np.asarray(dist @ op)
        worst = 0.5 * float(np.max(np.abs(dist - p[None, :]).sum(axis=1)))
        if worst < eps:
            return t
    raise StepBudgetExceeded(max_steps, f"not mixed to {eps} in {max_steps} steps")
