"""Shared fixtures: the printed three-point example and random-instance
generators used across the suite."""

import numpy as np
import pytest

from permchain import involution_from_map, uniform
from permchain.divergence import random_reversible


# The three-point chain with uniform stationary law, its swap involution,
# and the products printed alongside it.
P3 = np.array([
    [1 / 2, 1 / 3, 1 / 6],
    [1 / 3, 1 / 6, 1 / 2],
    [1 / 6, 1 / 2, 1 / 3],
])
Q3_MAP = np.array([1, 0, 2])
Q3_MATRIX = np.array([
    [0.0, 1.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0],
])
QP3 = np.array([
    [1 / 3, 1 / 6, 1 / 2],
    [1 / 2, 1 / 3, 1 / 6],
    [1 / 6, 1 / 2, 1 / 3],
])
PQ3 = np.array([
    [1 / 3, 1 / 2, 1 / 6],
    [1 / 6, 1 / 3, 1 / 2],
    [1 / 2, 1 / 6, 1 / 3],
])
QPQ3 = np.array([
    [1 / 6, 1 / 3, 1 / 2],
    [1 / 3, 1 / 2, 1 / 6],
    [1 / 2, 1 / 6, 1 / 3],
])
EIG3 = 1.0 / (2.0 * np.sqrt(3.0))


@pytest.fixture
def three_point():
    pi = uniform(3)
    swap = involution_from_map(Q3_MAP, pi)
    return P3.copy(), swap, pi


def random_pi(n, rng):
    """Random full-support distribution, bounded away from zero."""
    p = rng.dirichlet(np.ones(n)) + 0.05
    return p / p.sum()


def reversible_instance(n, rng, uniform_pi=False):
    """(P, pi) with P reversible for pi and full support."""
    p = np.full(n, 1.0 / n) if uniform_pi else random_pi(n, rng)
    return random_reversible(p, rng), p


def random_involution_map(n, rng, max_pairs=None):
    """Random involution mapping on 0..n-1 for a uniform distribution."""
    idx = rng.permutation(n)
    mapping = np.arange(n)
    limit = n // 2 if max_pairs is None else min(max_pairs, n // 2)
    k = int(rng.integers(1, limit + 1)) if limit >= 1 else 0
    for i in range(k):
        a, b = idx[2 * i], idx[2 * i + 1]
        mapping[a], mapping[b] = b, a
    return mapping


def psd_reversible_instance(n, rng, uniform_pi=True):
    """Positive-semi-definite reversible kernel (lazy half-identity mix)."""
    p0, pi = reversible_instance(n, rng, uniform_pi=uniform_pi)
    return 0.5 * (np.eye(n) + p0), pi
