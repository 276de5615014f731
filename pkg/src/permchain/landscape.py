"""Metropolis-Hastings kernels over energy landscapes, exact critical-height
computation through minimax path elevations, the two-mode line example, and
Arrhenius slope estimation for relaxation times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import (
    InvolutionPermutation,
    ProbabilityVector,
    StochasticMatrix,
    _as_matrix,
    _frozen,
    birth_death_chain,
    involution_from_map,
    is_irreducible,
    probability_vector,
    validate_stochastic,
)
from .errors import Disconnected
from .spectral import spectrum

SUPPORT_THRESHOLD = 1e-15


@dataclass(frozen=True)
class Landscape:
    """An energy function on a finite state space together with a symmetric
    irreducible proposal chain and an inverse temperature."""

    energies: np.ndarray
    proposal: StochasticMatrix
    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        n = self.proposal.n
        if self.energies.shape != (n,):
            raise ValueError("energies must match the proposal state count")
        if not np.allclose(self.proposal.m, self.proposal.m.T, atol=1e-12):
            raise ValueError("proposal must be symmetric")
        if not is_irreducible(self.proposal.m):
            raise ValueError("proposal must be irreducible")


def make_landscape(energies, proposal, beta: float) -> Landscape:
    prop = proposal if isinstance(proposal, StochasticMatrix) else validate_stochastic(proposal)
    return Landscape(_frozen(np.asarray(energies, dtype=float)), prop, float(beta))


def gibbs(energies, beta: float) -> ProbabilityVector:
    """Boltzmann weights exp(-beta H) normalized after shifting by the minimum
    energy for stability."""
    h = np.asarray(energies, dtype=float)
    w = np.exp(-beta * (h - h.min()))
    return probability_vector(w / w.sum())


def mh_kernel(ls: Landscape) -> StochasticMatrix:
    """Metropolis kernel: off-diagonal N(x,y) exp(-beta (H(y) - H(x))_+),
    remainder on the diagonal. Reversible for the Gibbs law of the landscape."""
    n_mat = ls.proposal.m
    h = ls.energies
    up = np.maximum(h[None, :] - h[:, None], 0.0)
    p = n_mat * np.exp(-ls.beta * up)
    np.fill_diagonal(p, 0.0)
    np.fill_diagonal(p, 1.0 - p.sum(axis=1))
    return validate_stochastic(p, tol=1e-9, stationary=gibbs(h, ls.beta))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.members = [[i] for i in range(n)]

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> tuple[list[int], list[int]] | None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if len(self.members[ra]) < len(self.members[rb]):
            ra, rb = rb, ra
        merged_small = self.members[rb]
        merged_large = self.members[ra]
        self.parent[rb] = ra
        self.members[ra] = merged_large + merged_small
        self.members[rb] = []
        return merged_large, merged_small


def bottleneck_matrix(support, energies) -> np.ndarray:
    """Minimax path elevations: entry (x, y) is the lowest possible highest
    energy along support paths from x to y, endpoints included.

    States are activated in increasing energy (ties in index order) and merged
    with union-find; a pair's value is the activation energy at which their
    components first connect.
    """
    adj = np.asarray(support, dtype=bool)
    h = np.asarray(energies, dtype=float)
    n = h.shape[0]
    order = sorted(range(n), key=lambda i: (h[i], i))
    uf = _UnionFind(n)
    active = np.zeros(n, dtype=bool)
    hh = np.full((n, n), np.nan)
    np.fill_diagonal(hh, h)
    for v in order:
        active[v] = True
        for u in np.nonzero((adj[v] | adj[:, v]) & active)[0]:
            merged = uf.union(int(u), v)
            if merged is None:
                continue
            big, small = merged
            level = h[v]
            for a in small:
                for b in big:
                    if a == b:
                        continue
                    hh[a, b] = hh[b, a] = level
    if np.isnan(hh).any():
        raise Disconnected("support graph is not connected")
    return hh


@dataclass(frozen=True)
class CriticalHeightReport:
    bottleneck: np.ndarray
    height: float
    argmax_pair: tuple[int, int]


def critical_height(support, energies) -> CriticalHeightReport:
    """Largest residual barrier max_{x,y} (H(x,y)-bar - H(x) - H(y)) plus the
    global minimum energy."""
    h = np.asarray(energies, dtype=float)
    hh = bottleneck_matrix(support, h)
    scores = hh - h[:, None] - h[None, :]
    x, y = np.unravel_index(int(np.argmax(scores)), scores.shape)
    height = float(scores[x, y] + h.min())
    return CriticalHeightReport(hh, height, (int(x), int(y)))


def support_of(P, threshold: float = SUPPORT_THRESHOLD) -> np.ndarray:
    """Off-diagonal support of a proposal: an edge exists where the entry
    exceeds the threshold. The diagonal never contributes to paths."""
    m = _as_matrix(P)
    adj = m > threshold
    np.fill_diagonal(adj, False)
    return adj


def bimodal_instance(j: int, beta: float = 1.0):
    """The two-mode line {-J..J}: energies -|x| except the two rightmost
    states sit at -J and -J-1, a nearest-neighbour proposal holding at the
    ends, and the swap pairing the local minimum -J with the state J-1.

    Returns (states, energies, proposal, swap); the swap preserves Boltzmann
    weights at every inverse temperature because the two paired states share
    one energy.
    """
    if j < 1:
        raise ValueError("j must be at least 1")
    xs = np.arange(-j, j + 1)
    n = xs.shape[0]
    h = np.empty(n, dtype=float)
    for i, x in enumerate(xs):
        if x < j - 1:
            h[i] = -abs(x)
        elif x == j - 1:
            h[i] = -j
        else:
            h[i] = -j - 1
    prop = birth_death_chain(n)
    mapping = np.arange(n)
    i_low, i_mid = 0, n - 2  # states -J and J-1
    mapping[i_low], mapping[i_mid] = i_mid, i_low
    swap = involution_from_map(mapping, gibbs(h, beta), mode="exact")
    return xs, h, prop, swap


def arrhenius_table(kernel_builder, betas) -> list[dict]:
    """Rows of (beta, gap, t_rel, ln_t_rel) for a builder mapping an inverse
    temperature to a reversible kernel and its stationary law."""
    rows = []
    for beta in betas:
        p, pi = kernel_builder(float(beta))
        rep = spectrum(p, pi)
        rows.append({
            "beta": float(beta),
            "gap": rep.gap,
            "t_rel": rep.relaxation_time,
            "ln_t_rel": math.log(rep.relaxation_time),
        })
    return rows


def arrhenius_slope(kernel_builder, betas) -> float:
    """Least-squares slope of ln t_rel against beta over a grid of at least
    four increasing inverse temperatures."""
    bs = [float(b) for b in betas]
    if len(bs) < 4 or any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
        raise ValueError("need at least 4 strictly increasing beta values")
    rows = arrhenius_table(kernel_builder, bs)
    y = np.array([r["ln_t_rel"] for r in rows])
    slope, _ = np.polyfit(np.array(bs), y, 1)
    return float(slope)
