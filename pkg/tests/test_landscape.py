"""Gibbs laws, Metropolis kernels, minimax elevations, critical heights, the
two-mode line study, and Arrhenius slopes."""

import itertools
import math

import numpy as np
import pytest

import permchain as pc
from permchain.errors import Disconnected
from permchain.landscape import (
    arrhenius_slope,
    bimodal_instance,
    bottleneck_matrix,
    critical_height,
    gibbs,
    make_landscape,
    mh_kernel,
    support_of,
)


def exhaustive_bottleneck(adj, h):
    """Oracle: enumerate all simple paths and take the minimax elevation."""
    n = len(h)
    best = np.full((n, n), np.inf)
    np.fill_diagonal(best, h)

    def walk(path, elev):
        x = path[-1]
        for y in range(n):
            if (adj[path[-1], y] or adj[y, path[-1]]) and y not in path:
                e = max(elev, h[y])
                if e < best[path[0], y]:
                    best[path[0], y] = e
                walk(path + [y], e)

    for s in range(n):
        walk([s], h[s])
    return best


class TestGibbs:
    def test_zero_temperature_is_uniform(self):
        pi = gibbs(np.array([3.0, -1.0, 4.0]), 0.0)
        assert np.allclose(pi.p, 1 / 3, atol=1e-15)

    def test_two_state_hand_value(self):
        pi = gibbs(np.array([0.0, 1.0]), math.log(2.0))
        assert np.allclose(pi.p, [2 / 3, 1 / 3], atol=1e-15)

    def test_equal_mass_iff_equal_energy(self):
        h = np.array([2.0, 5.0, 2.0, 7.0])
        pi = gibbs(h, 1.3)
        for x, y in itertools.combinations(range(4), 2):
            if h[x] == h[y]:
                assert pi.p[x] == pi.p[y]
            else:
                assert pi.p[x] != pi.p[y]


class TestMHKernel:
    def test_infinite_temperature_returns_proposal(self):
        _, h, prop, _ = bimodal_instance(3)
        k = mh_kernel(make_landscape(h, prop, 0.0))
        assert np.max(np.abs(k.m - prop.m)) < 1e-15

    def test_flat_energies_return_proposal(self):
        prop = pc.birth_death_chain(6)
        k = mh_kernel(make_landscape(np.zeros(6), prop, 2.5))
        assert np.max(np.abs(k.m - prop.m)) < 1e-15

    def test_detailed_balance(self):
        _, h, prop, _ = bimodal_instance(3)
        beta = 1.7
        k = mh_kernel(make_landscape(h, prop, beta))
        pi = gibbs(h, beta)
        # oracle: direct flux comparison
        flux = pi.p[:, None] * k.m
        assert np.max(np.abs(flux - flux.T)) < 1e-15


class TestBottleneck:
    def test_monotone_path_graph(self):
        n = 6
        h = np.arange(n, dtype=float)
        adj = support_of(pc.birth_death_chain(n).m)
        hh = bottleneck_matrix(adj, h)
        for x in range(n):
            for y in range(n):
                assert hh[x, y] == max(h[min(x, y):max(x, y) + 1])

    def test_adjacent_pairs_attain_endpoint_max(self):
        rng = np.random.default_rng(0)
        h = rng.integers(0, 5, size=7).astype(float)
        adj = support_of(pc.birth_death_chain(7).m)
        hh = bottleneck_matrix(adj, h)
        for x in range(6):
            assert hh[x, x + 1] <= max(h[x], h[x + 1]) + 1e-15

    def test_random_landscapes_match_exhaustive_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(3, 9))
            # random connected support: a path plus random extra edges
            adj = np.zeros((n, n), dtype=bool)
            order = rng.permutation(n)
            for a, b in zip(order, order[1:]):
                adj[a, b] = adj[b, a] = True
            for _ in range(int(rng.integers(0, n))):
                a, b = rng.integers(0, n, size=2)
                if a != b:
                    adj[a, b] = adj[b, a] = True
            h = rng.integers(0, 6, size=n).astype(float)  # ties likely
            got = bottleneck_matrix(adj, h)
            oracle = exhaustive_bottleneck(adj, h)
            assert np.max(np.abs(got - oracle)) == 0.0

    def test_disconnected_rejected(self):
        adj = np.zeros((4, 4), dtype=bool)
        adj[0, 1] = adj[1, 0] = adj[2, 3] = adj[3, 2] = True
        with pytest.raises(Disconnected):
            bottleneck_matrix(adj, np.zeros(4))


class TestCriticalHeight:
    @pytest.mark.parametrize("j", [3, 5, 8])
    def test_two_mode_height_is_exactly_j(self, j):
        _, h, prop, _ = bimodal_instance(j)
        rep = critical_height(support_of(prop.m), h)
        assert rep.height == float(j)

    def test_barrier_sits_at_the_middle_hill(self):
        _, h, prop, _ = bimodal_instance(4)
        hh = critical_height(support_of(prop.m), h).bottleneck
        # between the two modes the best path must climb to energy 0
        assert hh[0, 8] == 0.0 == h[4]

    def test_flat_landscape_height_zero(self):
        prop = pc.birth_death_chain(5)
        assert critical_height(support_of(prop.m), np.zeros(5)).height == 0.0

    @pytest.mark.parametrize("j", [3, 5, 8])
    def test_projected_support_removes_barrier(self, j):
        _, h, prop, swap = bimodal_instance(j)
        mixed = 0.5 * prop.m + 0.5 * pc.conjugate(swap, prop.m)
        rep = critical_height(support_of(mixed), h)
        assert rep.height == 0.0


class TestBimodalInstance:
    def test_energy_profile(self):
        xs, h, prop, swap = bimodal_instance(3)
        assert xs.tolist() == [-3, -2, -1, 0, 1, 2, 3]
        assert h.tolist() == [-3, -2, -1, 0, -1, -3, -4]
        assert swap(0) == 5 and swap(5) == 0

    def test_swap_equal_energy_at_every_beta(self):
        for beta in (0.5, 1.0, 4.0):
            _, h, _, swap = bimodal_instance(6, beta)
            pi = gibbs(h, beta)
            assert pi.p[0] == pi.p[swap(0)]

    def test_degenerate_smallest_instance(self):
        xs, h, prop, swap = bimodal_instance(1)
        assert xs.tolist() == [-1, 0, 1]
        assert h.tolist() == [-1, -1, -2]
        assert swap(0) == 1

    def test_modes(self):
        _, h, _, _ = bimodal_instance(5)
        assert np.argmin(h) == 10  # global mode at +J
        assert h[0] == -5  # local mode at -J


def _projected_builder(j):
    def build(beta):
        _, h, prop, swap = bimodal_instance(j, beta)
        k = mh_kernel(make_landscape(h, prop, beta))
        proj = pc.project(k.m, swap, k.stationary.p)
        return proj.m, k.stationary.p
    return build


def _base_builder(j):
    def build(beta):
        _, h, prop, _ = bimodal_instance(j)
        k = mh_kernel(make_landscape(h, prop, beta))
        return k.m, k.stationary.p
    return build


class TestArrhenius:
    def test_flat_slope_is_zero(self):
        prop = pc.birth_death_chain(9)

        def flat(beta):
            k = mh_kernel(make_landscape(np.zeros(9), prop, beta))
            return k.m, k.stationary.p

        assert abs(arrhenius_slope(flat, [1, 2, 3, 4])) < 1e-10

    def test_two_mode_slope_tracks_barrier(self):
        slope = arrhenius_slope(_base_builder(4), [1, 2, 3, 4])
        assert slope == pytest.approx(4.0, rel=0.15)

    def test_projected_slope_vanishes(self):
        slope = arrhenius_slope(_projected_builder(4), [1, 2, 3, 4])
        assert abs(slope) <= 0.1

    def test_needs_four_points(self):
        with pytest.raises(ValueError):
            arrhenius_slope(_base_builder(3), [1, 2, 3])


class TestProposalIdentities:
    def test_similarity_preserves_critical_height(self):
        _, h, prop, swap = bimodal_instance(5)
        base = critical_height(support_of(prop.m), h).height
        relabeled = critical_height(support_of(pc.conjugate(swap, prop.m)), h).height
        assert relabeled == base

    def test_mixture_support_lowers_height_monotonically(self):
        _, h, prop, swap = bimodal_instance(4)
        qnq = pc.conjugate(swap, prop.m)
        base = critical_height(support_of(prop.m), h).height
        for a in (0.25, 0.5, 0.75):
            mixed = a * prop.m + (1 - a) * qnq
            assert critical_height(support_of(mixed), h).height <= base

    def test_projection_equals_modified_proposal_kernel(self):
        # mixing the kernel with its conjugate is the kernel of the mixed
        # proposal, entrywise
        for j, beta, a in ((3, 1.5, 0.3), (5, 2.0, 0.5), (4, 3.0, 0.8)):
            _, h, prop, swap = bimodal_instance(j, beta)
            k = mh_kernel(make_landscape(h, prop, beta))
            lhs = pc.project_alpha(k.m, swap, a).m
            mixed_prop = a * prop.m + (1 - a) * pc.conjugate(swap, prop.m)
            rhs = mh_kernel(make_landscape(h, mixed_prop, beta)).m
            assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestCubicRelaxationBound:
    @pytest.mark.parametrize("j", [3, 5, 8])
    @pytest.mark.parametrize("beta", [2.0, 4.0, 8.0])
    def test_projected_relaxation_is_polynomial(self, j, beta):
        kern, pi = _projected_builder(j)(beta)
        t_rel = pc.spectrum(kern, pi).relaxation_time
        assert t_rel <= (2 * j * j - j) * (4 * j + 2) * 4
