"""Trajectory-level samplers on spin systems: the line Ising model, the
fully-connected Edwards-Anderson spin glass, and the line Blume-Capel model,
with single-site Metropolis dynamics, projection samplers driven by
configuration involutions (fixed, adaptive, exploratory), the recursive
composite-permutation step, and trace diagnostics.

Configurations are int8 vectors. Involutions on configurations are callables
returning fresh arrays; the adaptive map stores only its non-fixed pairs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .chains import InvolutionPermutation, involution_from_map, validate_stochastic
from .errors import ConfigInvalid, TooLarge
from .landscape import gibbs
from .projection import ProjectionSchedule
from .tuning import AdaptiveState

# Substream tags: every random stream is keyed by (seed, tag[, index]) so a
# run is reproducible and samplers sharing a seed share their initial state.
_INIT_TAG = 101
_CHAIN_TAG = 202
_EXPLORE_TAG = 303

MODEL_KINDS = ("ising", "ea", "bc")
SAMPLERS = ("standard", "fixed_q", "adaptive", "exploratory")


@dataclass(frozen=True)
class SpinModel:
    """A spin Hamiltonian on d sites. ``couplings`` is the symmetric +-1
    interaction matrix of the Edwards-Anderson glass and None otherwise."""

    kind: str
    d: int
    couplings: np.ndarray | None = None

    @property
    def alphabet(self) -> tuple[int, ...]:
        return (-1, 0, 1) if self.kind == "bc" else (-1, 1)

    @property
    def num_configs(self) -> int:
        return len(self.alphabet) ** self.d


def ising_line(d: int) -> SpinModel:
    if d < 1:
        raise ConfigInvalid("d must be at least 1")
    return SpinModel("ising", d)


def edwards_anderson(d: int, seed: int) -> SpinModel:
    """Couplings are i.i.d. +-1 with equal probability, symmetrized, zero
    diagonal, reproducible per seed."""
    if d < 1:
        raise ConfigInvalid("d must be at least 1")
    rng = np.random.default_rng((seed, 77))
    j = rng.integers(0, 2, size=(d, d)) * 2 - 1
    j = np.triu(j, 1)
    j = j + j.T
    j.flags.writeable = False
    return SpinModel("ea", d, j)


def blume_capel(d: int) -> SpinModel:
    if d < 1:
        raise ConfigInvalid("d must be at least 1")
    return SpinModel("bc", d)


def spin_model(kind: str, d: int, couplings_seed: int = 0) -> SpinModel:
    if kind == "ising":
        return ising_line(d)
    if kind == "ea":
        return edwards_anderson(d, couplings_seed)
    if kind == "bc":
        return blume_capel(d)
    raise ConfigInvalid(f"unknown model kind {kind!r}")


def random_config(model: SpinModel, rng: np.random.Generator) -> np.ndarray:
    letters = np.array(model.alphabet, dtype=np.int8)
    return letters[rng.integers(0, len(letters), size=model.d)]


def hamiltonian(model: SpinModel, spins: np.ndarray) -> int:
    x = spins.astype(np.int64, copy=False)
    if model.kind == "ising":
        return int(model.d - 1 - np.dot(x[:-1], x[1:]))
    if model.kind == "ea":
        return int(-(x @ (model.couplings @ x)) // 2)
    diff = x[:-1] - x[1:]
    return int(np.dot(diff, diff))


def delta_h(model: SpinModel, spins: np.ndarray, site: int, new_spin: int) -> int:
    """Energy change of setting one site, computed locally: O(1) for the two
    line models, O(d) for the glass."""
    old = int(spins[site])
    if new_spin == old:
        return 0
    if model.kind == "ising":
        acc = 0
        if site > 0:
            acc += int(spins[site - 1]) * (old - new_spin)
        if site < model.d - 1:
            acc += int(spins[site + 1]) * (old - new_spin)
        return acc
    if model.kind == "ea":
        row = model.couplings[site]
        return int(-(new_spin - old) * int(row @ spins.astype(np.int64, copy=False)))
    acc = 0
    for nb in (site - 1, site + 1):
        if 0 <= nb < model.d:
            v = int(spins[nb])
            acc += (new_spin - v) ** 2 - (old - v) ** 2
    return acc


# alternatives[old + 1] lists the two other letters of the three-letter model
_BC_ALTERNATIVES = ((0, 1), (-1, 1), (-1, 0))


def _propose(model: SpinModel, spins: np.ndarray, rng: np.random.Generator) -> tuple[int, int]:
    site = int(rng.integers(0, model.d))
    if model.kind == "bc":
        new = _BC_ALTERNATIVES[int(spins[site]) + 1][int(rng.integers(0, 2))]
    else:
        new = -int(spins[site])
    return site, new


def _step_inplace(model: SpinModel, spins: np.ndarray, beta: float,
                  rng: np.random.Generator,
                  exp_cache: dict) -> tuple[int, int] | None:
    """One Metropolis move mutating ``spins``. Returns (energy change, spin
    change) when accepted, None when rejected. The uniform variate is drawn
    only for uphill moves."""
    site, new = _propose(model, spins, rng)
    dh = delta_h(model, spins, site, new)
    if dh > 0:
        p = exp_cache.get(dh)
        if p is None:
            p = math.exp(-beta * dh)
            exp_cache[dh] = p
        if rng.random() >= p:
            return None
    old = int(spins[site])
    spins[site] = new
    return dh, new - old


def mh_step(model: SpinModel, spins: np.ndarray, beta: float,
            rng: np.random.Generator) -> np.ndarray:
    """Single-site Metropolis step: pick a uniform site, propose a uniform
    different spin, accept downhill always and uphill with the Boltzmann
    factor. Returns a new configuration."""
    out = spins.copy()
    _step_inplace(model, out, beta, rng, {})
    return out


class GlobalFlip:
    """The sign flip on configurations, with the all-ones and all-minus-ones
    configurations kept fixed (set ``fix_ground=False`` to flip them too).
    An involution that preserves the energy of all three models."""

    def __init__(self, model: SpinModel, fix_ground: bool = True):
        self.d = model.d
        self.fix_ground = fix_ground

    def __call__(self, spins: np.ndarray) -> np.ndarray:
        if self.fix_ground:
            s0 = int(spins[0])
            if s0 != 0 and np.all(spins == s0):
                return spins.copy()
        return (-spins).astype(np.int8)


class PairSwap:
    """Involution exchanging two distinguished configurations, identity
    elsewhere."""

    def __init__(self, a: np.ndarray, b: np.ndarray):
        self._a = a.astype(np.int8).tobytes()
        self._b = b.astype(np.int8).tobytes()
        self._arr_a = np.frombuffer(self._a, dtype=np.int8).copy()
        self._arr_b = np.frombuffer(self._b, dtype=np.int8).copy()

    def __call__(self, spins: np.ndarray) -> np.ndarray:
        key = spins.tobytes()
        if key == self._a:
            return self._arr_b.copy()
        if key == self._b:
            return self._arr_a.copy()
        return spins.copy()


class PairMapInvolution:
    """Involution defined by a dictionary of byte-encoded partner pairs; keys
    absent from the dictionary are fixed points. The dictionary may keep
    growing while the involution is in use (adaptive sampling)."""

    def __init__(self, pairs: dict):
        self.pairs = pairs

    def __call__(self, spins: np.ndarray) -> np.ndarray:
        partner = self.pairs.get(spins.tobytes())
        if partner is None:
            return spins.copy()
        return np.frombuffer(partner, dtype=np.int8).copy()


def symmetry_involution(model: SpinModel, fix_ground: bool = True) -> GlobalFlip:
    """The natural symmetry of the three models: energies are invariant under
    the global sign flip, so it is equi-probability at every temperature."""
    return GlobalFlip(model, fix_ground=fix_ground)


def projected_step(model: SpinModel, spins: np.ndarray, beta: float, sigma,
                   rng: np.random.Generator) -> np.ndarray:
    """One step of the half-mixture of the Metropolis kernel with its
    sigma-conjugate: a fair coin picks the plain step or the conjugated one
    (apply sigma, step, apply sigma). The coin is drawn first."""
    if rng.random() < 0.5:
        return mh_step(model, spins, beta, rng)
    out = sigma(spins)
    _step_inplace(model, out, beta, rng, {})
    return sigma(out)


@dataclass(frozen=True)
class PermutationProgram:
    """Realized composite permutation for one step of the n-fold recursive
    projection kernel: entry i is either None (identity) or the involution of
    stage (i mod m), each chosen by a fair coin."""

    sigmas: tuple

    @staticmethod
    def draw(involutions, depth: int, rng: np.random.Generator) -> "PermutationProgram":
        m = len(involutions)
        chosen = tuple(
            None if rng.random() < 0.5 else involutions[i % m]
            for i in range(depth))
        return PermutationProgram(chosen)


def recursive_rn_step(chain, state, program: PermutationProgram,
                      rng: np.random.Generator):
    """One step of the depth-n recursive projection kernel: conjugate the
    base step by the realized composite permutation (innermost stage applied
    to the state last, undone first)."""
    z = state
    for s in reversed(program.sigmas):
        if s is not None:
            z = s(z)
    y = chain.step(z, rng)
    for s in program.sigmas:
        if s is not None:
            y = s(y)
    return y


class SpinChain:
    """Adapter giving a spin model the one-step interface used by the
    recursive kernel."""

    def __init__(self, model: SpinModel, beta: float):
        self.model = model
        self.beta = beta
        self._cache: dict = {}

    def step(self, spins: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        out = spins.copy()
        _step_inplace(self.model, out, self.beta, rng, self._cache)
        return out


class MatrixChain:
    """Adapter sampling rows of a dense transition matrix over integer
    states."""

    def __init__(self, P):
        m = np.asarray(P, dtype=float)
        self.cum = np.cumsum(m, axis=1)

    def step(self, state: int, rng: np.random.Generator) -> int:
        j = int(np.searchsorted(self.cum[state], rng.random(), side="right"))
        return min(j, self.cum.shape[1] - 1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings of one spin experiment; validated on construction."""

    model: str
    d: int
    beta: float
    steps: int
    seed: int
    sampler: str
    beta_e: float = 0.1
    explore_steps: int | None = None
    adapt_every: int = 50
    record_stride: int = 10
    couplings_seed: int | None = None
    fix_ground: bool = True

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ConfigInvalid(f"unknown model {self.model!r}")
        if self.sampler not in SAMPLERS:
            raise ConfigInvalid(f"unknown sampler {self.sampler!r}")
        if self.d < 1:
            raise ConfigInvalid("d must be at least 1")
        if self.beta < 0 or self.beta_e < 0:
            raise ConfigInvalid("inverse temperatures must be nonnegative")
        if self.steps < 0:
            raise ConfigInvalid("steps must be nonnegative")
        if self.adapt_every < 1 or self.record_stride < 1:
            raise ConfigInvalid("periods must be positive")
        if self.explore_steps is not None and self.explore_steps < 0:
            raise ConfigInvalid("explore_steps must be nonnegative")


@dataclass(frozen=True)
class TraceRecord:
    """Recorded trajectory of one sampler run. The magnetization and energy
    series are sampled every ``stride`` steps; the jump total and the
    extremes are accumulated over every step."""

    sampler: str
    model: str
    d: int
    beta: float
    seed: int
    steps: int
    stride: int
    record_steps: np.ndarray
    magnetization: np.ndarray
    hamiltonian: np.ndarray
    jump_total: float
    m_min: float
    m_max: float

    @staticmethod
    def from_series(ms, hs=None, stride: int = 1, sampler: str = "synthetic",
                    model: str = "ising", d: int = 1, beta: float = 0.0,
                    seed: int = 0) -> "TraceRecord":
        """Wrap a raw per-step magnetization series (stride 1) as a record."""
        m = np.asarray(ms, dtype=float)
        h = np.zeros_like(m) if hs is None else np.asarray(hs, dtype=float)
        jump = float(np.abs(np.diff(m)).sum()) if m.size > 1 else 0.0
        steps = int(m.size)
        return TraceRecord(sampler, model, d, beta, seed, steps, stride,
                           np.arange(1, steps + 1), m, h, jump,
                           float(m.min()) if m.size else 0.0,
                           float(m.max()) if m.size else 0.0)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "magnetization", "hamiltonian"])
            for t, m, h in zip(self.record_steps, self.magnetization,
                               self.hamiltonian):
                w.writerow([int(t), f"{m:.12g}", f"{h:.12g}"])


@dataclass(frozen=True)
class TraceSummary:
    sample_mean: float
    ci_low: float
    ci_high: float
    avg_jump: float
    naive_ci_low: float
    naive_ci_high: float


def summarize(trace: TraceRecord, batches: int = 20) -> TraceSummary:
    """Sample mean with a 95% interval from non-overlapping batch means
    (20 batches), the i.i.d. interval for comparison, and the average jump
    distance of magnetization over all steps."""
    m = trace.magnetization
    avg_jump = trace.jump_total / (trace.steps - 1) if trace.steps > 1 else 0.0
    if m.size == 0:
        nan = float("nan")
        return TraceSummary(nan, nan, nan, avg_jump, nan, nan)
    mean = float(m.mean())
    naive_half = 0.0
    if m.size > 1:
        naive_half = 1.96 * float(m.std(ddof=1)) / math.sqrt(m.size)
    if m.size >= batches:
        groups = np.array_split(m, batches)
        bm = np.array([g.mean() for g in groups])
        spread = float(bm.std(ddof=1))
        half = float(stats.t.ppf(0.975, batches - 1)) * spread / math.sqrt(batches)
    else:
        half = naive_half
    return TraceSummary(mean, mean - half, mean + half, avg_jump,
                        mean - naive_half, mean + naive_half)


def summary_json(config: ExperimentConfig, trace: TraceRecord) -> dict:
    s = summarize(trace)
    return {
        "model": config.model,
        "sampler": trace.sampler,
        "d": config.d,
        "beta": config.beta,
        "steps": config.steps,
        "seed": config.seed,
        "sample_mean": s.sample_mean,
        "ci_low": s.ci_low,
        "ci_high": s.ci_high,
        "avg_jump_distance": s.avg_jump,
        "naive_ci_low": s.naive_ci_low,
        "naive_ci_high": s.naive_ci_high,
    }


def _explore_pairs(model: SpinModel, config: ExperimentConfig) -> dict:
    """Run the high-temperature exploration chain and return its equi-energy
    pairing."""
    rng = np.random.default_rng((config.seed, _EXPLORE_TAG))
    spins = random_config(model, rng)
    h = hamiltonian(model, spins)
    tracker = AdaptiveState(period=config.adapt_every)
    tracker.record(spins.tobytes(), h)
    cache: dict = {}
    steps = config.steps if config.explore_steps is None else config.explore_steps
    for _ in range(steps):
        moved = _step_inplace(model, spins, config.beta_e, rng, cache)
        if moved is not None:
            h += moved[0]
        tracker.record(spins.tobytes(), h)
    return tracker.pairs


def run_experiment(config: ExperimentConfig) -> TraceRecord:
    """Run the configured sampler, recording magnetization and energy every
    ``record_stride`` steps and accumulating per-step jump statistics.

    The initial configuration depends only on (seed, model dimensions), so
    samplers sharing a seed start from the same state.
    """
    model = spin_model(config.model, config.d,
                       config.seed if config.couplings_seed is None
                       else config.couplings_seed)
    init_rng = np.random.default_rng((config.seed, _INIT_TAG))
    spins = random_config(model, init_rng)
    rng = np.random.default_rng((config.seed, _CHAIN_TAG))

    sampler = config.sampler
    tracker = None
    sigma = None
    program_involutions = None
    if sampler == "fixed_q":
        flip = GlobalFlip(model, fix_ground=config.fix_ground)
        if model.kind == "bc":
            ones = np.ones(model.d, dtype=np.int8)
            zeros = np.zeros(model.d, dtype=np.int8)
            program_involutions = (flip, PairSwap(ones, zeros))
        else:
            sigma = flip
    elif sampler == "adaptive":
        tracker = AdaptiveState(period=config.adapt_every)
        sigma = PairMapInvolution(tracker.pairs)
    elif sampler == "exploratory":
        sigma = PairMapInvolution(_explore_pairs(model, config))

    d = model.d
    beta = config.beta
    stride = config.record_stride
    cache: dict = {}
    h = hamiltonian(model, spins)
    m_sum = int(spins.sum())
    m_prev = m_sum / d
    m_min = m_max = m_prev
    jump_total = 0.0
    rec_steps: list[int] = []
    rec_m: list[float] = []
    rec_h: list[float] = []
    if tracker is not None:
        tracker.record(spins.tobytes(), h)

    for t in range(1, config.steps + 1):
        if sampler == "standard":
            moved = _step_inplace(model, spins, beta, rng, cache)
            if moved is not None:
                h += moved[0]
                m_sum += moved[1]
        elif program_involutions is not None:
            # Every involution here preserves the energy exactly, so the
            # composite step changes h by the base step's increment only.
            program = PermutationProgram.draw(program_involutions, 2, rng)
            z = spins
            for s in reversed(program.sigmas):
                if s is not None:
                    z = s(z)
            moved = _step_inplace(model, z, beta, rng, cache)
            for s in program.sigmas:
                if s is not None:
                    z = s(z)
            spins = z
            if moved is not None:
                h += moved[0]
            m_sum = int(spins.sum())
        else:
            if rng.random() < 0.5:
                moved = _step_inplace(model, spins, beta, rng, cache)
                if moved is not None:
                    h += moved[0]
                    m_sum += moved[1]
            else:
                z = sigma(spins)
                moved = _step_inplace(model, z, beta, rng, cache)
                if moved is not None:
                    h += moved[0]
                spins = sigma(z)
                m_sum = int(spins.sum())
        if tracker is not None:
            tracker.record(spins.tobytes(), h)
        m = m_sum / d
        jump_total += abs(m - m_prev)
        m_prev = m
        if m < m_min:
            m_min = m
        elif m > m_max:
            m_max = m
        if t % stride == 0:
            rec_steps.append(t)
            rec_m.append(m)
            rec_h.append(float(h))

    return TraceRecord(sampler, config.model, config.d, config.beta,
                       config.seed, config.steps, stride,
                       np.array(rec_steps, dtype=int),
                       np.array(rec_m), np.array(rec_h),
                       jump_total, m_min, m_max)


# Dense codecs for enumerable toy models: configurations are indexed in
# base-|alphabet| order so trajectory samplers can be compared against their
# matrix counterparts.

DENSE_CONFIG_CAP = 4096


def enumerate_configs(model: SpinModel, cap: int = DENSE_CONFIG_CAP) -> np.ndarray:
    total = model.num_configs
    if total > cap:
        raise TooLarge(f"{total} configurations exceed the dense cap {cap}")
    letters = np.array(model.alphabet, dtype=np.int8)
    a = len(letters)
    configs = np.empty((total, model.d), dtype=np.int8)
    for i in range(total):
        v = i
        for pos in range(model.d - 1, -1, -1):
            configs[i, pos] = letters[v % a]
            v //= a
    return configs


def config_index(model: SpinModel, configs: np.ndarray) -> dict:
    return {configs[i].tobytes(): i for i in range(configs.shape[0])}


def dense_energies(model: SpinModel, configs: np.ndarray) -> np.ndarray:
    return np.array([hamiltonian(model, c) for c in configs], dtype=float)


def dense_mh_matrix(model: SpinModel, beta: float,
                    cap: int = DENSE_CONFIG_CAP):
    """Exact transition matrix of the single-site Metropolis sampler on the
    enumerated configuration space; returns (matrix, stationary law, configs).
    """
    configs = enumerate_configs(model, cap)
    index = config_index(model, configs)
    n = configs.shape[0]
    a = len(model.alphabet)
    p = np.zeros((n, n))
    prop = 1.0 / (model.d * (a - 1))
    for i in range(n):
        x = configs[i]
        for site in range(model.d):
            for s in model.alphabet:
                if s == int(x[site]):
                    continue
                dh = delta_h(model, x, site, s)
                y = x.copy()
                y[site] = s
                j = index[y.tobytes()]
                p[i, j] += prop * math.exp(-beta * max(dh, 0))
    np.fill_diagonal(p, 1.0 - p.sum(axis=1))
    pi = gibbs(dense_energies(model, configs), beta)
    return validate_stochastic(p, tol=1e-9, stationary=pi), pi, configs


def dense_involution(model: SpinModel, sigma, beta: float,
                     cap: int = DENSE_CONFIG_CAP) -> InvolutionPermutation:
    """Matrix-level involution induced by a configuration involution on the
    enumerated space, validated against the Boltzmann law at ``beta``."""
    configs = enumerate_configs(model, cap)
    index = config_index(model, configs)
    mapping = np.empty(configs.shape[0], dtype=int)
    for i in range(configs.shape[0]):
        mapping[i] = index[sigma(configs[i]).tobytes()]
    pi = gibbs(dense_energies(model, configs), beta)
    return involution_from_map(mapping, pi, mode="tolerance", eps=1e-9)


def exploratory_build(model: SpinModel, beta_e: float, steps: int, seed: int,
                      runs: int = 1, period: int = 50, beta: float | None = None,
                      cap: int = DENSE_CONFIG_CAP):
    """Build equi-energy involutions from high-temperature exploration chains
    on an enumerable model; one run yields an involution, several yield a
    projection schedule combining them.

    The pairing is validated against the Boltzmann law at ``beta`` (defaults
    to ``beta_e``); pairs match energies exactly, so the result is valid at
    any temperature.
    """
    target_beta = beta_e if beta is None else beta
    configs = enumerate_configs(model, cap)
    index = config_index(model, configs)
    pi = gibbs(dense_energies(model, configs), target_beta)
    involutions = []
    for r in range(runs):
        rng = np.random.default_rng((seed, _EXPLORE_TAG, r))
        spins = random_config(model, rng)
        h = hamiltonian(model, spins)
        tracker = AdaptiveState(period=period)
        tracker.record(spins.tobytes(), h)
        cache: dict = {}
        for _ in range(steps):
            moved = _step_inplace(model, spins, beta_e, rng, cache)
            if moved is not None:
                h += moved[0]
            tracker.record(spins.tobytes(), h)
        mapping = np.arange(configs.shape[0])
        for key, partner in tracker.pairs.items():
            mapping[index[key]] = index[partner]
        involutions.append(involution_from_map(mapping, pi, mode="tolerance",
                                               eps=1e-9))
    if runs == 1:
        return involutions[0]
    return ProjectionSchedule(tuple(involutions))
