"""Strategies for choosing the permutation parameter: exhaustive involution
enumeration over equi-probability classes, exact and local-search assignment
solvers scoring the projection displacement, and the trajectory-driven
equi-energy pairing tracker used by adaptive samplers.
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Hashable, Iterator

import numpy as np

from .chains import (
    InvolutionPermutation,
    ProbabilityVector,
    _as_matrix,
    _as_prob,
    involution_from_map,
    probability_vector,
)
from .divergence import frobenius_dist, kl_rate
from .errors import CapExceeded
from .projection import project


@dataclass(frozen=True)
class EquiClassIndex:
    """Partition of states into classes of equal probability (or energy),
    with a per-state class lookup. The comparison mode is fixed when the
    index is built."""

    classes: tuple[tuple[int, ...], ...]
    lookup: np.ndarray
    pi: ProbabilityVector | None
    mode: str

    @property
    def n(self) -> int:
        return self.lookup.shape[0]


def _partition(values: np.ndarray, mode: str, eps: float) -> list[list[int]]:
    order = sorted(range(values.shape[0]), key=lambda i: (values[i], i))
    classes: list[list[int]] = []
    for i in order:
        if classes:
            ref = values[classes[-1][-1]]
            v = values[i]
            same = (v == ref) if mode == "exact" else (
                abs(v - ref) <= eps * max(abs(v), abs(ref), 1e-300))
            if same:
                classes[-1].append(i)
                continue
        classes.append([i])
    for cls in classes:
        cls.sort()
    classes.sort(key=lambda c: c[0])
    return classes


def equi_class_index(pi, mode: str = "exact", eps: float = 1e-9) -> EquiClassIndex:
    """Group states by equal stationary probability."""
    if mode not in ("exact", "tolerance"):
        raise ValueError(f"unknown mode {mode!r}")
    pv = pi if isinstance(pi, ProbabilityVector) else probability_vector(pi)
    classes = _partition(pv.p, mode, eps)
    lookup = np.empty(pv.n, dtype=int)
    for cid, cls in enumerate(classes):
        for i in cls:
            lookup[i] = cid
    lookup.flags.writeable = False
    return EquiClassIndex(tuple(tuple(c) for c in classes), lookup, pv, mode)


def involution_count(index: EquiClassIndex) -> int:
    """Number of involutions respecting the partition: the product over
    classes of the telephone numbers T(k) = T(k-1) + (k-1) T(k-2)."""
    total = 1
    for cls in index.classes:
        k = len(cls)
        t0, t1 = 1, 1
        for i in range(2, k + 1):
            t0, t1 = t1, t1 + (i - 1) * t0
        total *= t1
    return total


def _class_involutions(cls: tuple[int, ...]) -> Iterator[list[tuple[int, int]]]:
    """All pairings-with-fixed-points of one class, as lists of pairs."""
    if len(cls) <= 1:
        yield []
        return
    head, rest = cls[0], cls[1:]
    for sub in _class_involutions(rest):
        yield sub  # head stays fixed
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for sub in _class_involutions(remaining):
            yield [(head, partner)] + sub


def enumerate_involutions(index: EquiClassIndex, cap: int) -> Iterator[InvolutionPermutation]:
    """Yield every involution compatible with the equi-probability partition
    exactly once, the identity included. Refuses to start if the total count
    exceeds the cap."""
    count = involution_count(index)
    if count > cap:
        raise CapExceeded(count, cap)
    if index.pi is None:
        raise ValueError("index carries no distribution to validate against")
    eps = 1e-9 if index.mode == "tolerance" else 0.0
    for combo in itertools.product(*[list(_class_involutions(c)) for c in index.classes]):
        mapping = np.arange(index.n)
        for pairs in combo:
            for a, b in pairs:
                mapping[a], mapping[b] = b, a
        yield involution_from_map(mapping, index.pi, mode=index.mode, eps=eps)


def projection_displacement(P, psi: InvolutionPermutation, pi) -> float:
    """Squared weighted Frobenius distance from P to its projection under
    psi; by the Pythagorean identity, maximizing it over involutions is the
    same as minimizing the distance from the projection to stationarity."""
    d = frobenius_dist(P, project(P, psi, pi).m, pi)
    return d * d


def assignment_exact(P, pi, cap: int = 100_000, mode: str = "exact",
                     eps: float = 1e-9) -> tuple[InvolutionPermutation, float]:
    """Best involution by exhaustive enumeration, scored by the projection
    displacement; ties resolve to the lexicographically smallest mapping."""
    p = _as_prob(pi)
    index = equi_class_index(p, mode=mode, eps=eps)
    best = None
    best_score = -1.0
    for psi in enumerate_involutions(index, cap):
        score = projection_displacement(P, psi, p)
        if best is None or score > best_score or (
                score == best_score and tuple(psi.mapping) < tuple(best.mapping)):
            best, best_score = psi, score
    return best, best_score


@dataclass
class LocalSearchResult:
    involution: InvolutionPermutation
    score: float
    accepted_scores: list[float]


@dataclass
class JointSearchResult:
    involutions: list
    score: float
    accepted_scores: list[float]


def assignment_local_search(P, pi, budget: int, seed: int, mode: str = "exact",
                            eps: float = 1e-9) -> LocalSearchResult:
    """First-improvement hill climbing over pair moves within equi-probability
    classes: add a pair of fixed points, remove a pair, or exchange partners
    between two pairs. The budget counts candidate evaluations; the accepted
    score sequence is non-decreasing and the walk is deterministic per seed.
    """
    p = _as_prob(pi)
    index = equi_class_index(p, mode=mode, eps=eps)
    rng = np.random.default_rng(seed)
    mapping = np.arange(index.n)

    def build(m):
        return involution_from_map(m, index.pi, mode=index.mode,
                                   eps=1e-9 if index.mode == "tolerance" else 0.0)

    current = build(mapping)
    current_score = projection_displacement(P, current, p)
    history = [current_score]
    evaluations = 0
    improved = True
    while improved and evaluations < budget:
        improved = False
        candidates = []
        for cls in index.classes:
            fixed = [i for i in cls if mapping[i] == i]
            paired = [(i, int(mapping[i])) for i in cls if i < mapping[i]]
            for a, b in itertools.combinations(fixed, 2):
                candidates.append(("add", a, b))
            for a, b in paired:
                candidates.append(("remove", a, b))
            for (a, b), (c, d) in itertools.combinations(paired, 2):
                candidates.append(("swap", (a, b), (c, d), 0))
                candidates.append(("swap", (a, b), (c, d), 1))
        rng.shuffle(candidates)
        for move in candidates:
            if evaluations >= budget:
                break
            trial = mapping.copy()
            if move[0] == "add":
                _, a, b = move
                trial[a], trial[b] = b, a
            elif move[0] == "remove":
                _, a, b = move
                trial[a], trial[b] = a, b
            else:
                _, (a, b), (c, d), variant = move
                if variant == 0:
                    trial[a], trial[c] = c, a
                    trial[b], trial[d] = d, b
                else:
                    trial[a], trial[d] = d, a
                    trial[b], trial[c] = c, b
            cand = build(trial)
            score = projection_displacement(P, cand, p)
            evaluations += 1
            if score > current_score + 1e-15:
                mapping = trial
                current, current_score = cand, score
                history.append(score)
                improved = True
                break
    return LocalSearchResult(current, current_score, history)


def kl_displacement(P, psi: InvolutionPermutation, pi) -> float:
    """KL rate from the projection back to P; the KL analogue of the
    Frobenius displacement score."""
    return float(kl_rate(P, project(P, psi, pi).m, pi))


def cycle_displacement(P, psis: list[InvolutionPermutation], pi) -> float:
    """Total squared Frobenius movement over one projection cycle through the
    given involutions; by telescoping, larger movement means a cycle limit
    closer to stationarity."""
    p = _as_prob(pi)
    current = _as_matrix(P)
    total = 0.0
    for psi in psis:
        nxt = project(current, psi, p).m
        step = frobenius_dist(current, nxt, p)
        total += step * step
        current = nxt
    return total


def assignment_joint_local_search(P, pi, m: int, budget: int, seed: int,
                                  mode: str = "exact",
                                  eps: float = 1e-9):
    """Joint hill climbing over a tuple of m involutions (the multidimensional
    variant, feasible only at tiny sizes): the same pair moves as the
    single-permutation search, applied to one schedule slot at a time, scored
    by the movement of one full projection cycle."""
    p = _as_prob(pi)
    index = equi_class_index(p, mode=mode, eps=eps)
    rng = np.random.default_rng(seed)
    mappings = [np.arange(index.n) for _ in range(m)]
    v_eps = 1e-9 if index.mode == "tolerance" else 0.0

    def build(ms):
        return [involution_from_map(mm, index.pi, mode=index.mode, eps=v_eps)
                for mm in ms]

    current = build(mappings)
    current_score = cycle_displacement(P, current, p)
    history = [current_score]
    evaluations = 0
    improved = True
    while improved and evaluations < budget:
        improved = False
        candidates = []
        for slot in range(m):
            mapping = mappings[slot]
            for cls in index.classes:
                fixed = [i for i in cls if mapping[i] == i]
                paired = [(i, int(mapping[i])) for i in cls if i < mapping[i]]
                for a, b in itertools.combinations(fixed, 2):
                    candidates.append((slot, "add", a, b))
                for a, b in paired:
                    candidates.append((slot, "remove", a, b))
        rng.shuffle(candidates)
        for slot, kind, a, b in candidates:
            if evaluations >= budget:
                break
            trial = [mm.copy() for mm in mappings]
            if kind == "add":
                trial[slot][a], trial[slot][b] = b, a
            else:
                trial[slot][a], trial[slot][b] = a, b
            cand = build(trial)
            score = cycle_displacement(P, cand, p)
            evaluations += 1
            if score > current_score + 1e-15:
                mappings = trial
                current, current_score = cand, score
                history.append(score)
                improved = True
                break
    return JointSearchResult(current, current_score, history)


@dataclass
class AdaptiveState:
    """Single-owner tracker that grows an equi-energy pairing from a visited
    trajectory. States are hashable keys; energies are exact (integer) keys.

    Mapped states are never re-mapped. Every ``period`` recorded steps, the
    oldest unmapped visited state with an unmapped equal-energy partner is
    paired with the oldest such partner.
    """

    period: int = 50
    pairs: dict = field(default_factory=dict)
    _pending: "OrderedDict[Hashable, tuple]" = field(default_factory=OrderedDict)
    _by_energy: dict = field(default_factory=dict)
    _seen: set = field(default_factory=set)
    steps: int = 0
    updates: int = 0

    def partner(self, key: Hashable):
        return self.pairs.get(key)

    def record(self, key: Hashable, energy) -> bool:
        """Record one visited state; at epoch boundaries attempt one pairing.
        Returns True when the permutation changed."""
        if key not in self._seen:
            self._seen.add(key)
            if key not in self.pairs:
                self._pending[key] = (self.steps, energy)
                self._by_energy.setdefault(energy, []).append(key)
        self.steps += 1
        if self.steps % self.period == 0:
            return self._try_pair()
        return False

    def _try_pair(self) -> bool:
        # Keys leave _pending and _by_energy together, so the per-energy lists
        # hold only unmapped states and their heads are the oldest visits.
        best_energy = None
        best_rank = None
        for energy, keys in self._by_energy.items():
            if len(keys) < 2:
                continue
            rank = self._pending[keys[0]][0]
            if best_rank is None or rank < best_rank:
                best_rank, best_energy = rank, energy
        if best_energy is None:
            return False
        keys = self._by_energy[best_energy]
        a, b = keys[0], keys[1]
        self._by_energy[best_energy] = keys[2:]
        del self._pending[a]
        del self._pending[b]
        self.pairs[a] = b
        self.pairs[b] = a
        self.updates += 1
        return True


def adaptive_record(state: Hashable, energy, tracker: AdaptiveState) -> AdaptiveState:
    """Feed one visited (state, energy) observation into the tracker; the
    pairing may grow by one pair at epoch boundaries."""
    tracker.record(state, energy)
    return tracker


# Permutation text format: one line "x y" per non-fixed point meaning
# psi(x) = y; omitted states are fixed points.

def write_permutation(path, psi) -> None:
    mapping = psi.mapping if hasattr(psi, "mapping") else np.asarray(psi, int)
    with open(path, "w") as fh:
        for x, y in enumerate(mapping):
            if x != y:
                fh.write(f"{x} {int(y)}\n")


def read_permutation_map(path, n: int) -> np.ndarray:
    mapping = np.arange(n)
    with open(path) as fh:
        for lineno, ln in enumerate(fh, start=1):
            ln = ln.strip()
            if not ln:
                continue
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'x y'")
            x, y = int(parts[0]), int(parts[1])
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"line {lineno}: state out of range")
            mapping[x] = y
    return mapping
