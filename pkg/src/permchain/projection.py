"""Projections of transition matrices onto permutation-twisted self-adjoint
sets, mixtures of a kernel with its permutation conjugate, cyclic alternating
projections with convergence diagnostics, structural limits under
transposition schedules, and subspace-angle rate certificates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .chains import (
    GeneralPermutation,
    InvolutionPermutation,
    ProbabilityVector,
    StochasticMatrix,
    _as_matrix,
    _as_prob,
    adjoint,
    conjugate,
    is_reversible,
    stationary_matrix,
    validate_stochastic,
)
from .divergence import frobenius_dist, kl_rate
from .errors import DimensionMismatch, NotReversible, TooLarge, TraceOutOfRange
from .spectral import spectrum

SUBSPACE_ANGLE_MAX_STATES = 24


@dataclass(frozen=True)
class MixWeight:
    """A mixture weight in [0, 1]."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


def _alpha_value(alpha) -> float:
    a = alpha.alpha if isinstance(alpha, MixWeight) else float(alpha)
    MixWeight(a)
    return a


def project(P, Q, pi) -> StochasticMatrix:
    """Half-sum of P with the Q-conjugate of its time reversal,
    (P + Q P* Q) / 2.

    For an involution Q this is the orthogonal (and information) projection of
    a stationary P onto the matrices L with L* = QLQ; it is idempotent. A
    general permutation Q is accepted as well (uniform-stationary setting), in
    which case only idempotence and stochasticity are guaranteed.
    """
    m = _as_matrix(P)
    p = _as_prob(pi)
    if m.shape[0] != p.shape[0]:
        raise DimensionMismatch(f"matrix {m.shape} vs distribution {p.shape}")
    star = adjoint(m, p)
    if isinstance(Q, (InvolutionPermutation, GeneralPermutation)):
        mapping = Q.mapping
        inv = np.empty_like(mapping)
        inv[mapping] = np.arange(mapping.shape[0])
        twisted = star[np.ix_(mapping, inv)]
    else:
        q = _as_matrix(Q)
        twisted = q @ star @ q
    out = 0.5 * (m + twisted)
    pv = pi if isinstance(pi, ProbabilityVector) else ProbabilityVector(p)
    return validate_stochastic(out, tol=1e-9, stationary=pv)


def project_alpha(P, Q, alpha) -> StochasticMatrix:
    """Convex mixture alpha P + (1 - alpha) QPQ of a kernel with its
    permutation conjugate; at alpha = 1/2 and reversible P this coincides
    with ``project``."""
    a = _alpha_value(alpha)
    m = _as_matrix(P)
    qpq = conjugate(Q, m) if hasattr(Q, "mapping") else _as_matrix(Q) @ m @ _as_matrix(Q)
    out = a * m + (1.0 - a) * qpq
    pv = None
    if isinstance(P, StochasticMatrix):
        pv = P.stationary
    return validate_stochastic(out, tol=1e-9, stationary=pv)


@dataclass(frozen=True)
class ProjectionSchedule:
    """An ordered cycle of involutions over a common distribution."""

    involutions: tuple[InvolutionPermutation, ...]

    def __post_init__(self):
        if len(self.involutions) < 1:
            raise ValueError("schedule needs at least one involution")
        base = self.involutions[0].pi.p
        for q in self.involutions[1:]:
            if q.pi.p.shape != base.shape or not np.allclose(q.pi.p, base):
                raise ValueError("schedule entries must share one distribution")

    @property
    def m(self) -> int:
        return len(self.involutions)

    @property
    def pi(self) -> ProbabilityVector:
        return self.involutions[0].pi


def schedule(*involutions: InvolutionPermutation) -> ProjectionSchedule:
    return ProjectionSchedule(tuple(involutions))


@dataclass(frozen=True)
class ProjectionRun:
    """The iterates of a cyclic projection sweep with per-step diagnostics.

    ``kl_decrements[j]`` is the KL rate from iterate j+1 to iterate j and
    ``frob_decrements[j]`` the squared weighted Frobenius step; the trace is
    constant along the run. ``slems`` holds the second-largest eigenvalue
    modulus of each iterate.
    """

    iterates: tuple[np.ndarray, ...]
    kl_decrements: tuple[float, ...]
    frob_decrements: tuple[float, ...]
    kl_to_stationary: tuple[float, ...]
    slems: tuple[float, ...]
    trace: float
    converged: bool
    final_step: float
    pi: ProbabilityVector

    @property
    def limit(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    def write_csv(self, path) -> None:
        """Columns: step, kl_to_pi, frob_step, trace, slem. ``frob_step`` of
        row j is the Frobenius distance from iterate j-1 (0 for the first)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "kl_to_pi", "frob_step", "trace", "slem"])
            for j, r in enumerate(self.iterates):
                step = 0.0 if j == 0 else math.sqrt(self.frob_decrements[j - 1])
                w.writerow([j, f"{self.kl_to_stationary[j]:.12g}",
                            f"{step:.12g}", f"{np.trace(r):.12g}",
                            f"{self.slems[j]:.12g}"])


def alternating_projections(P, sched: ProjectionSchedule, max_sweeps: int = 10_000,
                            eps: float = 1e-10) -> ProjectionRun:
    """Cyclically project a reversible P onto each twisted self-adjoint set in
    the schedule until one full cycle moves less than ``eps`` in Frobenius
    distance, or the sweep budget runs out.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    pi = sched.pi
    p = _as_prob(pi)
    m = _as_matrix(P)
    rep = is_reversible(m, p, tol=1e-10)
    if not rep.reversible:
        raise NotReversible(f"detailed balance violated by {rep.max_violation:.3e}")

    pimat = _as_matrix(stationary_matrix(pi))
    iterates = [m]
    kl_dec: list[float] = []
    frob_dec: list[float] = []
    kl_to_pi = [float(kl_rate(m, pimat, p))]
    slems = [spectrum(m, p).slem]
    converged = False
    final_step = math.inf
    current = m
    for _ in range(max_sweeps):
        cycle_max = 0.0
        for q in sched.involutions:
            nxt = project(current, q, pi).m
            step = frobenius_dist(current, nxt, p)
            cycle_max = max(cycle_max, step)
            kl_dec.append(float(kl_rate(current, nxt, p)))
            frob_dec.append(step * step)
            iterates.append(nxt)
            kl_to_pi.append(float(kl_rate(nxt, pimat, p)))
            slems.append(spectrum(nxt, p).slem)
            current = nxt
        final_step = cycle_max
        if cycle_max < eps:
            converged = True
            break
    return ProjectionRun(tuple(iterates), tuple(kl_dec), tuple(frob_dec),
                         tuple(kl_to_pi), tuple(slems), float(np.trace(m)),
                         converged, final_step, pi)


@dataclass(frozen=True)
class UniformStructureFit:
    """Least-squares fit of a matrix to the form (nb) Pi + (a - b) I on the
    uniform distribution: constant diagonal a and constant off-diagonal b."""

    a: float
    b: float
    residual: float
    mixture_identity: float  # nb + (a - b); equals 1 for a stochastic fit


def structure_fit_uniform(R) -> UniformStructureFit:
    m = _as_matrix(R)
    n = m.shape[0]
    diag = np.diagonal(m)
    off = m[~np.eye(n, dtype=bool)]
    a = float(diag.mean())
    b = float(off.mean()) if off.size else 0.0
    fitted = np.full((n, n), b)
    np.fill_diagonal(fitted, a)
    residual = float(np.max(np.abs(m - fitted)))
    return UniformStructureFit(a, b, residual, n * b + a - b)


@dataclass(frozen=True)
class SpeedLimitReport:
    """Necessary conditions for cyclic projections to reach the rank-one
    stationary matrix: unit trace and a shared eigenvalue of P and -P*, plus
    the half-gap trace condition Tr(P) <= (n+1)/2."""

    trace: float
    trace_one: bool
    sylvester_overlap: bool
    min_eigen_gap: float
    gap_half_condition: bool


def speed_limit_report(P, pi, tol: float = 1e-9) -> SpeedLimitReport:
    m = _as_matrix(P)
    p = _as_prob(pi)
    n = m.shape[0]
    tr = float(np.trace(m))
    lam = np.linalg.eigvals(m)
    lam_star = np.linalg.eigvals(adjoint(m, p))
    gaps = np.abs(lam[:, None] + lam_star[None, :])
    min_gap = float(gaps.min())
    return SpeedLimitReport(
        trace=tr,
        trace_one=abs(tr - 1.0) <= tol,
        sylvester_overlap=min_gap <= tol,
        min_eigen_gap=min_gap,
        gap_half_condition=tr <= (n + 1) / 2.0,
    )


def trace_shift(P, pi) -> StochasticMatrix:
    """Lazy shift P' = alpha I + (1 - alpha) P with alpha = (1-c)/(n-c) and
    c = Tr(P), bringing the trace to exactly 1. Requires the uniform
    distribution, a symmetric P, and c in [0, 1)."""
    m = _as_matrix(P)
    p = _as_prob(pi)
    n = m.shape[0]
    if not np.allclose(p, 1.0 / n):
        raise ValueError("trace shift is defined on the uniform distribution")
    if not np.allclose(m, m.T, atol=1e-12):
        raise ValueError("trace shift requires a symmetric matrix")
    c = float(np.trace(m))
    if not 0.0 <= c < 1.0:
        raise TraceOutOfRange(f"trace {c} outside [0, 1)")
    alpha = (1.0 - c) / (n - c)
    out = alpha * np.eye(n) + (1.0 - alpha) * m
    return validate_stochastic(out, tol=1e-9,
                               stationary=ProbabilityVector(p.copy()))


def transposition_schedule(pi_or_n) -> ProjectionSchedule:
    """The cycle of transpositions swapping state 0 with each other state,
    defined for the uniform distribution."""
    from .chains import involution_from_map, uniform as uniform_pv

    if isinstance(pi_or_n, int):
        pv = uniform_pv(pi_or_n)
    else:
        pv = pi_or_n if isinstance(pi_or_n, ProbabilityVector) else ProbabilityVector(_as_prob(pi_or_n))
    n = pv.n
    invs = []
    for j in range(1, n):
        mapping = np.arange(n)
        mapping[0], mapping[j] = j, 0
        invs.append(involution_from_map(mapping, pv, mode="tolerance"))
    return ProjectionSchedule(tuple(invs))


@dataclass(frozen=True)
class SubspaceAngle:
    """Cosines of the angles between successive twisted subspaces and the
    combined per-cycle contraction rate sqrt(1 - prod(1 - a_i^2))."""

    per_stage: tuple[float, ...]
    alpha: float


def _fixed_space_projector(q: np.ndarray) -> np.ndarray:
    """Orthogonal projector, on vectorized matrices, onto {A : QAQ = A}."""
    n = q.shape[0]
    return 0.5 * (np.eye(n * n) + np.kron(q, q))


def _intersection_projector(projectors: list[np.ndarray]) -> np.ndarray:
    """Projector onto the common fixed space: the eigenspace at 1 of the
    average of the individual projectors."""
    b = sum(projectors) / len(projectors)
    vals, vecs = np.linalg.eigh(b)
    keep = vals > 1.0 - 1e-9
    v = vecs[:, keep]
    return v @ v.T


def subspace_angle(sched: ProjectionSchedule, pi=None) -> SubspaceAngle:
    """Angles between each twisted subspace and the intersection of the later
    ones, in the coordinate system conjugated by sqrt(pi) where the weighted
    Frobenius geometry is the standard one. Dense n^2 x n^2 operator algebra;
    rejects state spaces beyond a desk-scale cap.
    """
    pv = sched.pi if pi is None else (pi if isinstance(pi, ProbabilityVector)
                                      else ProbabilityVector(_as_prob(pi)))
    n = pv.n
    if n > SUBSPACE_ANGLE_MAX_STATES:
        raise TooLarge(f"n = {n} exceeds the dense-operator cap "
                       f"{SUBSPACE_ANGLE_MAX_STATES}")
    m = sched.m
    if m == 1:
        return SubspaceAngle((), 0.0)
    # Equi-probability involutions commute with the sqrt(pi) conjugation, so
    # their permutation matrices represent themselves in standard coordinates.
    ts = [_fixed_space_projector(q.matrix()) for q in sched.involutions]
    per_stage = []
    for i in range(m - 1):
        tail = ts[i + 1] if i + 1 == m - 1 else _intersection_projector(ts[i + 1:])
        cap = _intersection_projector([ts[i], tail])
        op = ts[i] @ tail @ (np.eye(n * n) - cap)
        a_i = float(np.linalg.norm(op, ord=2))
        per_stage.append(min(max(a_i, 0.0), 1.0))
    prod = 1.0
    for a_i in per_stage:
        prod *= 1.0 - a_i * a_i
    alpha = math.sqrt(max(1.0 - prod, 0.0))
    return SubspaceAngle(tuple(per_stage), alpha)


def rate_certificate(angle: SubspaceAngle, n_states: int, eps: float, m: int):
    """Smallest number of projection steps t (a whole number of cycles)
    guaranteeing Frobenius error at most eps, via the per-cycle contraction
    alpha and the crude bound ||P||_F <= sqrt(n). Returns math.inf when
    alpha = 1 certifies nothing."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = angle.alpha
    if a >= 1.0 - 1e-15:
        return math.inf
    if a <= 0.0:
        return m
    need = math.log(math.sqrt(n_states) / eps) / math.log(1.0 / a)
    cycles = max(1, math.ceil(need))
    return m * cycles
