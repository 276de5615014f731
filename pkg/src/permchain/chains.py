"""Core types for finite-chain analysis: distributions, transition matrices,
adjoints, and equi-probability involutions.

States are dense 0-based indices throughout. Labeled state spaces (spin
configurations, lattice points) are expected to map through an explicit codec
owned by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NoConvergence,
    NotEquiProbability,
    NotInvolution,
    ParseError,
    Periodic,
    Reducible,
    RowSumViolation,
)

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
EQUIPROB_REL_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ProbabilityVector:
    """A full-support probability mass on {0, ..., n-1}."""

    p: np.ndarray

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def __len__(self) -> int:
        return self.n


def probability_vector(raw, tol: float = 1e-9) -> ProbabilityVector:
    """Validate a full-support vector summing to 1 within ``tol``."""
    p = np.asarray(raw, dtype=float)
    if p.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {p.shape}")
    if np.any(p <= 0.0):
        raise NegativeEntry("probability vector must have full support")
    s = float(p.sum())
    if abs(s - 1.0) > tol:
        raise RowSumViolation(0, s - 1.0)
    return ProbabilityVector(_frozen(p))


def uniform(n: int) -> ProbabilityVector:
    return ProbabilityVector(_frozen(np.full(n, 1.0 / n)))


@dataclass(frozen=True)
class StochasticMatrix:
    """A dense row-stochastic matrix, optionally with its stationary law."""

    m: np.ndarray
    stationary: ProbabilityVector | None = None

    @property
    def n(self) -> int:
        return self.m.shape[0]


def _as_matrix(P) -> np.ndarray:
    if isinstance(P, StochasticMatrix):
        return P.m
    return np.asarray(P, dtype=float)


def _as_prob(pi) -> np.ndarray:
    if isinstance(pi, ProbabilityVector):
        return pi.p
    return np.asarray(pi, dtype=float)


def validate_stochastic(raw, tol: float = ROW_SUM_TOL,
                        stationary: ProbabilityVector | None = None,
                        stationary_tol: float = STATIONARY_TOL) -> StochasticMatrix:
    """Validate a square row-stochastic matrix; entries are never altered.

    If ``stationary`` is given, also verifies pi P = pi within
    ``stationary_tol`` before attaching it.
    """
    m = np.asarray(raw, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if np.any(m < 0.0):
        x, y = np.argwhere(m < 0.0)[0]
        raise NegativeEntry(f"negative entry {m[x, y]:.3e} at ({x}, {y})")
    dev = m.sum(axis=1) - 1.0
    worst = int(np.argmax(np.abs(dev)))
    if abs(dev[worst]) > tol:
        raise RowSumViolation(worst, float(dev[worst]))
    if stationary is not None:
        pi = stationary.p
        resid = float(np.abs(pi @ m - pi).sum())
        if resid > stationary_tol:
            raise NoConvergence(
                f"attached distribution is not stationary (L1 residual {resid:.3e})")
    return StochasticMatrix(_frozen(m), stationary)


def support_graph(P, threshold: float = 0.0) -> np.ndarray:
    """Boolean adjacency of entries strictly above ``threshold``."""
    return _as_matrix(P) > threshold


def _reachable_from(adj: np.ndarray, start: int) -> np.ndarray:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = adj[frontier].any(axis=0) & ~seen
        frontier = list(np.nonzero(nxt)[0])
        seen |= nxt
    return seen


def is_irreducible(P) -> bool:
    adj = support_graph(P)
    return bool(_reachable_from(adj, 0).all() and _reachable_from(adj.T, 0).all())


def period_of(P) -> int:
    """Period of an irreducible chain via BFS levels on the support graph.

    For a strongly connected graph the period equals
    gcd over edges (u, v) of (level(u) + 1 - level(v)).
    """
    adj = support_graph(P)
    n = adj.shape[0]
    level = np.full(n, -1, dtype=int)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(adj[u])[0]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    g = 0
    for u, v in zip(*np.nonzero(adj)):
        g = math.gcd(g, int(level[u]) + 1 - int(level[v]))
    return abs(g) if g != 0 else 1


def stationary_of(P, tol: float = STATIONARY_TOL) -> ProbabilityVector:
    """Stationary distribution of an irreducible, aperiodic chain.

    Solves the linear system pi (P - I) = 0 with the normalization
    sum(pi) = 1 by least squares and verifies the L1 residual.
    """
    m = _as_matrix(P)
    n = m.shape[0]
    if not is_irreducible(m):
        raise Reducible("support graph is not strongly connected")
    if period_of(m) != 1:
        raise Periodic(f"chain has period {period_of(m)}")
    a = np.vstack([m.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = float(np.abs(pi @ m - pi).sum())
    if resid > tol or np.any(pi <= 0.0):
        raise NoConvergence(f"stationary solve failed (residual {resid:.3e})")
    pi = pi / pi.sum()
    return ProbabilityVector(_frozen(pi))


def adjoint(P, pi) -> np.ndarray:
    """Time reversal of P in the geometry weighted by pi:
    P*(x, y) = pi(y) P(y, x) / pi(x)."""
    m = _as_matrix(P)
    p = _as_prob(pi)
    return (m.T * p[None, :] / p[:, None]).copy()


@dataclass(frozen=True)
class ReversibilityReport:
    reversible: bool
    max_violation: float
    worst_pair: tuple[int, int]


def is_reversible(P, pi, tol: float = 1e-10) -> ReversibilityReport:
    """Check detailed balance pi(x) P(x,y) = pi(y) P(y,x), reporting the
    largest violation and where it occurs."""
    m = _as_matrix(P)
    p = _as_prob(pi)
    flux = p[:, None] * m
    gap = np.abs(flux - flux.T)
    x, y = np.unravel_index(int(np.argmax(gap)), gap.shape)
    worst = float(gap[x, y])
    return ReversibilityReport(worst <= tol, worst, (int(x), int(y)))


@dataclass(frozen=True)
class GeneralPermutation:
    """An arbitrary bijection on indices 0..n-1."""

    mapping: np.ndarray

    @property
    def n(self) -> int:
        return self.mapping.shape[0]

    def inverse(self) -> "GeneralPermutation":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.n)
        inv.flags.writeable = False
        return GeneralPermutation(inv)

    def matrix(self) -> np.ndarray:
        q = np.zeros((self.n, self.n))
        q[np.arange(self.n), self.mapping] = 1.0
        return q

    def __call__(self, x: int) -> int:
        return int(self.mapping[x])


def general_permutation(mapping) -> GeneralPermutation:
    m = np.asarray(mapping, dtype=int)
    n = m.shape[0]
    if sorted(m.tolist()) != list(range(n)):
        raise NotInvolution("mapping is not a bijection on 0..n-1")
    mm = m.copy()
    mm.flags.writeable = False
    return GeneralPermutation(mm)


@dataclass(frozen=True)
class InvolutionPermutation:
    """A self-inverse permutation that preserves the attached distribution."""

    mapping: np.ndarray
    pi: ProbabilityVector

    @property
    def n(self) -> int:
        return self.mapping.shape[0]

    def matrix(self) -> np.ndarray:
        q = np.zeros((self.n, self.n))
        q[np.arange(self.n), self.mapping] = 1.0
        return q

    def __call__(self, x: int) -> int:
        return int(self.mapping[x])

    def pairs(self) -> list[tuple[int, int]]:
        """Non-fixed pairs (x, psi(x)) with x < psi(x)."""
        return [(int(x), int(y)) for x, y in enumerate(self.mapping) if x < y]


def involution_from_map(mapping, pi, mode: str = "exact",
                        eps: float = EQUIPROB_REL_TOL) -> InvolutionPermutation:
    """Validate a self-inverse, equi-probability permutation.

    ``mode`` is either ``"exact"`` (probabilities of swapped states must
    compare equal) or ``"tolerance"`` (relative gap at most ``eps``, for
    distributions assembled from floating-point weights). The mode is always
    explicit; it is never inferred from the data.
    """
    if mode not in ("exact", "tolerance"):
        raise ValueError(f"unknown mode {mode!r}")
    pv = pi if isinstance(pi, ProbabilityVector) else probability_vector(pi)
    m = np.asarray(mapping, dtype=int)
    n = pv.n
    if m.shape != (n,) or sorted(m.tolist()) != list(range(n)):
        raise NotInvolution("mapping is not a bijection on 0..n-1")
    bad = np.nonzero(m[m] != np.arange(n))[0]
    if bad.size:
        x = int(bad[0])
        raise NotInvolution(f"psi(psi({x})) = {int(m[m[x]])} != {x}")
    p = pv.p
    for x in range(n):
        y = int(m[x])
        if y == x:
            continue
        gap = abs(p[x] - p[y])
        if mode == "exact":
            if p[x] != p[y]:
                raise NotEquiProbability(x, y, gap)
        else:
            if gap > eps * max(p[x], p[y]):
                raise NotEquiProbability(x, y, gap)
    mm = m.copy()
    mm.flags.writeable = False
    return InvolutionPermutation(mm, pv)


def identity_involution(pi) -> InvolutionPermutation:
    pv = pi if isinstance(pi, ProbabilityVector) else probability_vector(pi)
    return involution_from_map(np.arange(pv.n), pv, mode="exact")


def permutation_matrix(perm) -> StochasticMatrix:
    """Matrix of a permutation: Q(x, y) = 1 iff y = perm(x)."""
    if isinstance(perm, (InvolutionPermutation, GeneralPermutation)):
        q = perm.matrix()
    else:
        q = general_permutation(perm).matrix()
    return StochasticMatrix(_frozen(q))


def stationary_matrix(pi) -> StochasticMatrix:
    """The rank-one matrix whose every row equals pi."""
    pv = pi if isinstance(pi, ProbabilityVector) else probability_vector(pi)
    m = np.tile(pv.p, (pv.n, 1))
    return StochasticMatrix(_frozen(m), pv)


def left_permute(perm, P) -> np.ndarray:
    """Q_perm @ P computed by row indexing."""
    mapping = perm.mapping if hasattr(perm, "mapping") else np.asarray(perm, int)
    return _as_matrix(P)[mapping, :].copy()


def right_permute(P, perm) -> np.ndarray:
    """P @ Q_perm computed by column indexing: (PQ)(x, y) = P(x, perm^-1(y))."""
    mapping = perm.mapping if hasattr(perm, "mapping") else np.asarray(perm, int)
    inv = np.empty_like(mapping)
    inv[mapping] = np.arange(mapping.shape[0])
    return _as_matrix(P)[:, inv].copy()


def conjugate(perm, P) -> np.ndarray:
    """Q P Q for an involution Q: entrywise (QPQ)(x, y) = P(psi(x), psi(y))."""
    mapping = perm.mapping if hasattr(perm, "mapping") else np.asarray(perm, int)
    m = _as_matrix(P)
    return m[np.ix_(mapping, mapping)].copy()


def birth_death_chain(n: int) -> StochasticMatrix:
    """Nearest-neighbour walk on a path of n states, holding with probability
    1/2 at both endpoints; its stationary distribution is uniform."""
    if n < 2:
        raise ValueError("need at least two states")
    m = np.zeros((n, n))
    m[0, 0] = m[n - 1, n - 1] = 0.5
    for x in range(n - 1):
        m[x, x + 1] = 0.5
        m[x + 1, x] = 0.5
    return StochasticMatrix(_frozen(m), uniform(n))


def random_permutation(n: int, seed: int) -> GeneralPermutation:
    """Uniform random permutation (Fisher-Yates shuffle), reproducible per seed."""
    rng = np.random.default_rng(seed)
    m = rng.permutation(n)
    m.flags.writeable = False
    return GeneralPermutation(m)


# Matrix text format: line 1 "n <int>", then n whitespace-separated rows,
# optionally a final line "pi <n floats>". Written with 17 significant digits
# so float64 values round-trip exactly.

def write_matrix(path, P, pi=None) -> None:
    m = _as_matrix(P)
    if pi is None and isinstance(P, StochasticMatrix) and P.stationary is not None:
        pi = P.stationary
    lines = [f"n {m.shape[0]}"]
    for row in m:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    if pi is not None:
        lines.append("pi " + " ".join(f"{v:.17g}" for v in _as_prob(pi)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> StochasticMatrix:
    with open(path) as fh:
        raw = [ln.strip() for ln in fh]
    lines = [ln for ln in raw if ln]
    if not lines or not lines[0].startswith("n "):
        raise ParseError("expected header 'n <int>'", line=1)
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ParseError("malformed header", line=1)
    if len(lines) < n + 1:
        raise ParseError(f"expected {n} rows after the header", line=len(lines))
    rows = []
    for i in range(1, n + 1):
        parts = lines[i].split()
        if len(parts) != n:
            raise ParseError(f"expected {n} entries, found {len(parts)}", line=i + 1)
        try:
            rows.append([float(v) for v in parts])
        except ValueError:
            raise ParseError("non-numeric entry", line=i + 1)
    pi = None
    if len(lines) > n + 1:
        parts = lines[n + 1].split()
        if parts[0] != "pi" or len(parts) != n + 1:
            raise ParseError("expected 'pi <n floats>'", line=n + 2)
        try:
            pi = probability_vector([float(v) for v in parts[1:]])
        except ValueError:
            raise ParseError("non-numeric entry in pi line", line=n + 2)
    return validate_stochastic(np.array(rows), stationary=pi)
