"""Divergences and contraction functionals between transition matrices:
pi-weighted KL rate, its permutation-deformed variants, pi-weighted total
variation, the pi-adjoint Frobenius inner product, and single-pair
contraction ratios with a randomized lower-bound estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from .chains import (
    InvolutionPermutation,
    ProbabilityVector,
    _as_matrix,
    _as_prob,
    conjugate,
    left_permute,
    right_permute,
)
from .errors import DimensionMismatch, ZeroDenominator


@total_ordering
@dataclass(frozen=True)
class DivergenceValue:
    """An extended nonnegative real. Infinity is an explicit flag, set only
    when an absolute-continuity violation was detected; comparisons are total.
    """

    value: float
    infinite: bool = False

    @staticmethod
    def finite(v: float) -> "DivergenceValue":
        return DivergenceValue(float(v), False)

    @staticmethod
    def infinity() -> "DivergenceValue":
        return DivergenceValue(math.inf, True)

    def __float__(self) -> float:
        return math.inf if self.infinite else self.value

    def __eq__(self, other) -> bool:
        return float(self) == float(other)

    def __lt__(self, other) -> bool:
        return float(self) < float(other)


def _check_shapes(*mats: np.ndarray) -> None:
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise DimensionMismatch(f"shape mismatch: {m.shape} vs {shape}")


def kl_rate(M, N, pi) -> DivergenceValue:
    """pi-weighted KL divergence rate sum_x pi(x) sum_y M(x,y) ln(M/N)(x,y).

    Terms with M(x,y) = 0 are skipped (0 ln 0 = 0 convention); an entry with
    M(x,y) > 0 while N(x,y) = 0 yields the infinity flag.
    """
    m, nn = _as_matrix(M), _as_matrix(N)
    _check_shapes(m, nn)
    p = _as_prob(pi)
    mask = m > 0.0
    if np.any(mask & (nn == 0.0)):
        return DivergenceValue.infinity()
    ratio = np.ones_like(m)
    np.divide(m, nn, out=ratio, where=mask)
    terms = np.zeros_like(m)
    np.multiply(m, np.log(ratio, where=mask, out=np.zeros_like(m)), out=terms,
                where=mask)
    return DivergenceValue.finite(float(p @ terms.sum(axis=1)))


def deformed_kl_left(P, L, Q: InvolutionPermutation, pi) -> DivergenceValue:
    """Left-deformed KL: the KL rate between QP and QL."""
    return kl_rate(left_permute(Q, P), left_permute(Q, L), pi)


def deformed_kl_right(P, L, Q: InvolutionPermutation, pi) -> DivergenceValue:
    """Right-deformed KL: the KL rate between PQ and LQ."""
    return kl_rate(right_permute(P, Q), right_permute(L, Q), pi)


def tv_weighted(M, N, pi) -> DivergenceValue:
    """pi-weighted total variation sum_x pi(x) sum_y |M(x,y) - N(x,y)|."""
    m, nn = _as_matrix(M), _as_matrix(N)
    _check_shapes(m, nn)
    p = _as_prob(pi)
    return DivergenceValue.finite(float(p @ np.abs(m - nn).sum(axis=1)))


def frobenius_inner(M, N, pi) -> float:
    """Frobenius inner product Tr(M* N) with the pi-adjoint M*, which equals
    sum_{x,y} (pi(x)/pi(y)) M(x,y) N(x,y)."""
    m, nn = _as_matrix(M), _as_matrix(N)
    _check_shapes(m, nn)
    p = _as_prob(pi)
    w = p[:, None] / p[None, :]
    return float(np.sum(w * m * nn))


def frobenius_norm(M, pi) -> float:
    return math.sqrt(max(frobenius_inner(M, M, pi), 0.0))


def frobenius_dist(M, N, pi) -> float:
    return frobenius_norm(_as_matrix(M) - _as_matrix(N), pi)


def dobrushin_ratio(M, N, P, pi) -> float:
    """One-step KL contraction ratio for a single pair of distinct
    pi-stationary matrices: KL(MP || NP) / KL(M || N), a value in [0, 1]."""
    m, nn, p = _as_matrix(M), _as_matrix(N), _as_matrix(P)
    den = kl_rate(m, nn, pi)
    if float(den) == 0.0:
        raise ZeroDenominator("the pair must be distinct")
    num = kl_rate(m @ p, nn @ p, pi)
    if den.infinite:
        return 1.0 if num.infinite else 0.0
    r = float(num) / float(den)
    if r > 1.0 + 1e-9:
        raise ArithmeticError(f"contraction ratio {r} above 1")
    return min(max(r, 0.0), 1.0)


def random_reversible(pi, rng: np.random.Generator) -> np.ndarray:
    """A full-support pi-reversible kernel: symmetric uniform weights define a
    proposal T(x,y) proportional to w(x,y) pi(y), corrected by the usual
    acceptance ratio, with the remainder on the diagonal."""
    p = _as_prob(pi)
    n = p.shape[0]
    w = rng.uniform(0.1, 1.0, size=(n, n))
    w = (w + w.T) / 2.0
    t = w * p[None, :]
    t /= t.sum(axis=1, keepdims=True)
    acc = np.minimum(1.0, (p[None, :] * t.T) / (p[:, None] * t))
    k = t * acc
    np.fill_diagonal(k, 0.0)
    np.fill_diagonal(k, 1.0 - k.sum(axis=1))
    return k


def random_stationary(pi, rng: np.random.Generator) -> np.ndarray:
    """A pi-stationary (generally non-reversible) kernel: a random convex
    mixture of a reversible draw and a permutation-shifted reversible draw."""
    p = _as_prob(pi)
    n = p.shape[0]
    a = random_reversible(p, rng)
    b = random_reversible(p, rng)
    perm = _random_equiprob_involution(p, rng)
    theta = rng.uniform(0.2, 0.8)
    return theta * a + (1.0 - theta) * left_permute(perm, b)


def _random_equiprob_involution(p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Mapping of a random equi-probability involution for p; identity when no
    two states carry equal mass."""
    mapping = np.arange(p.shape[0])
    groups: dict[float, list[int]] = {}
    for i, v in enumerate(p):
        groups.setdefault(float(v), []).append(i)
    for members in groups.values():
        members = list(members)
        rng.shuffle(members)
        for i in range(0, len(members) - 1, 2):
            if rng.random() < 0.5:
                a, b = members[i], members[i + 1]
                mapping[a], mapping[b] = b, a
    return mapping


def random_stationary_pair(pi, seed) -> tuple[np.ndarray, np.ndarray]:
    """A distinct pair of pi-stationary matrices, deterministic per seed.

    Draws alternate between plain reversible mixtures and permutation-shifted
    ones so the induced contraction ratios are not degenerate.
    """
    p = _as_prob(pi)
    rng = np.random.default_rng(seed)
    for _ in range(16):
        a = random_stationary(p, rng)
        b = random_stationary(p, rng)
        if np.max(np.abs(a - b)) > 1e-12:
            return a, b
    raise ArithmeticError("failed to draw a distinct stationary pair")


def dobrushin_lower_bound(P, pi, samples: int, seed: int) -> float:
    """Lower bound on the KL contraction coefficient of P: the maximum
    single-pair ratio over ``samples`` generated pairs.

    Pair k is derived from (seed, k), so estimates with nested sample counts
    share their prefix and the estimate is non-decreasing in ``samples``.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    best = 0.0
    for k in range(samples):
        m, nn = random_stationary_pair(pi, (seed, k))
        best = max(best, dobrushin_ratio(m, nn, P, pi))
    return best
