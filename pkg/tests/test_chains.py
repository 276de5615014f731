"""Core type validation, stationary solves, adjoints, involutions, and the
matrix text format."""

import numpy as np
import pytest
import scipy.linalg

import permchain as pc
from permchain.errors import (
    NegativeEntry,
    NoConvergence,
    NotEquiProbability,
    NotInvolution,
    Periodic,
    Reducible,
    RowSumViolation,
)

from conftest import P3, Q3_MATRIX, QP3, random_pi, reversible_instance


class TestValidateStochastic:
    def test_identity_valid(self):
        mat = pc.validate_stochastic(np.eye(4), tol=1e-12)
        assert mat.n == 4

    def test_three_point_valid(self):
        mat = pc.validate_stochastic(P3, tol=1e-12)
        assert np.array_equal(mat.m, P3)

    def test_row_sum_violation(self):
        bad = np.eye(3)
        bad[1, 1] = 1.001
        with pytest.raises(RowSumViolation) as err:
            pc.validate_stochastic(bad, tol=1e-12)
        assert err.value.row == 1
        assert err.value.deviation == pytest.approx(0.001)

    def test_negative_entry(self):
        bad = np.array([[1.2, -0.2], [0.5, 0.5]])
        with pytest.raises(NegativeEntry):
            pc.validate_stochastic(bad)

    def test_stationary_attachment_checked(self):
        pi = pc.probability_vector([0.8, 0.2])
        with pytest.raises(NoConvergence):
            pc.validate_stochastic(np.array([[0.0, 1.0], [1.0, 0.0]]),
                                   stationary=pi)


class TestStationaryOf:
    def test_three_point_uniform(self):
        pi = pc.stationary_of(P3)
        assert np.allclose(pi.p, 1 / 3, atol=1e-12)

    def test_rank_one_absorbs(self):
        p = random_pi(5, np.random.default_rng(0))
        mat = pc.stationary_matrix(p)
        got = pc.stationary_of(mat)
        assert np.allclose(got.p, p, atol=1e-12)

    def test_matches_left_eigenvector_oracle(self):
        rng = np.random.default_rng(7)
        p, _ = reversible_instance(5, rng)
        # oracle: left eigenvector of eigenvalue 1 via a full eigensolve
        vals, vecs = scipy.linalg.eig(p.T)
        idx = int(np.argmin(np.abs(vals - 1.0)))
        oracle = np.real(vecs[:, idx])
        oracle = oracle / oracle.sum()
        got = pc.stationary_of(p)
        assert np.allclose(got.p, oracle, atol=1e-10)

    def test_reducible_rejected(self):
        block = np.array([[0.5, 0.5, 0.0],
                          [0.5, 0.5, 0.0],
                          [0.0, 0.0, 1.0]])
        with pytest.raises(Reducible):
            pc.stationary_of(block)

    def test_periodic_rejected(self):
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(Periodic):
            pc.stationary_of(swap)


class TestAdjoint:
    def test_reversible_fixed_point(self):
        rng = np.random.default_rng(3)
        p, pi = reversible_instance(4, rng)
        assert np.allclose(pc.adjoint(p, pi), p, atol=1e-13)

    def test_involution_matrix_self_adjoint(self, three_point):
        _, swap, pi = three_point
        q = swap.matrix()
        assert np.allclose(pc.adjoint(q, pi.p), q, atol=0)

    def test_entrywise_formula_oracle(self):
        rng = np.random.default_rng(11)
        pi = random_pi(4, rng)
        p = rng.dirichlet(np.ones(4), size=4)  # arbitrary stochastic rows
        got = pc.adjoint(p, pi)
        for x in range(4):
            for y in range(4):
                assert got[x, y] == pytest.approx(pi[y] * p[y, x] / pi[x], abs=0, rel=1e-14)

    def test_double_adjoint_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            pi = random_pi(5, rng)
            p = rng.dirichlet(np.ones(5), size=5)
            back = pc.adjoint(pc.adjoint(p, pi), pi)
            assert np.max(np.abs(back - p)) < 1e-14

    def test_adjoint_commutes_with_conjugation(self):
        rng = np.random.default_rng(9)
        pi = pc.uniform(6)
        from conftest import random_involution_map

        for _ in range(10):
            q = pc.involution_from_map(random_involution_map(6, rng), pi)
            p, _ = reversible_instance(6, rng, uniform_pi=True)
            s = p @ np.diag(rng.uniform(0.5, 1.5, 6))
            s = s / s.sum(axis=1, keepdims=True)  # generic stochastic matrix
            lhs = pc.adjoint(pc.conjugate(q, s), pi.p)
            rhs = pc.conjugate(q, pc.adjoint(s, pi.p))
            assert np.max(np.abs(lhs - rhs)) < 1e-13


class TestReversibility:
    def test_three_point_reversible(self, three_point):
        p, _, pi = three_point
        assert pc.is_reversible(p, pi.p).reversible

    def test_permuted_product_not_reversible(self, three_point):
        _, _, pi = three_point
        rep = pc.is_reversible(QP3, pi.p)
        assert not rep.reversible
        assert rep.max_violation > 0.05

    def test_rank_one_reversible(self):
        p = random_pi(4, np.random.default_rng(2))
        assert pc.is_reversible(pc.stationary_matrix(p), p).reversible


class TestInvolutions:
    def test_identity_always_valid(self):
        p = random_pi(5, np.random.default_rng(1))
        psi = pc.involution_from_map(np.arange(5), p)
        assert np.array_equal(psi.matrix(), np.eye(5))

    def test_three_point_swap(self, three_point):
        _, swap, _ = three_point
        assert np.array_equal(swap.matrix(), Q3_MATRIX)
        q = swap.matrix()
        assert np.array_equal(q @ q, np.eye(3))

    def test_unequal_mass_rejected(self):
        pi = pc.probability_vector([0.5, 0.3, 0.2])
        with pytest.raises(NotEquiProbability) as err:
            pc.involution_from_map([1, 0, 2], pi)
        assert err.value.pair in ((0, 1), (1, 0))

    def test_non_involution_rejected(self):
        pi = pc.uniform(3)
        with pytest.raises(NotInvolution):
            pc.involution_from_map([1, 2, 0], pi)  # a 3-cycle

    def test_exact_matrix_algebra(self):
        # Q^2 = I and detailed balance hold exactly, not just approximately
        rng = np.random.default_rng(21)
        from conftest import random_involution_map

        for _ in range(25):
            n = int(rng.integers(2, 9))
            pi = pc.uniform(n)
            psi = pc.involution_from_map(random_involution_map(n, rng), pi)
            q = psi.matrix()
            assert np.array_equal(q @ q, np.eye(n))
            flux = pi.p[:, None] * q
            assert np.array_equal(flux, flux.T)

    def test_tolerance_mode(self):
        base = np.array([0.25, 0.25 * (1 + 1e-10), 0.5])
        pi = pc.probability_vector(base / base.sum())
        with pytest.raises(NotEquiProbability):
            pc.involution_from_map([1, 0, 2], pi, mode="exact")
        psi = pc.involution_from_map([1, 0, 2], pi, mode="tolerance", eps=1e-9)
        assert psi(0) == 1


class TestPermutationMatrices:
    def test_identity(self):
        mat = pc.permutation_matrix(np.arange(4))
        assert np.array_equal(mat.m, np.eye(4))

    def test_three_point_swap_matrix(self, three_point):
        _, swap, _ = three_point
        assert np.array_equal(pc.permutation_matrix(swap).m, Q3_MATRIX)

    def test_stationary_matrix_constant(self):
        mat = pc.stationary_matrix(pc.uniform(3))
        assert np.allclose(mat.m, 1 / 3, atol=0)


class TestBirthDeathChain:
    def test_two_states(self):
        assert np.array_equal(pc.birth_death_chain(2).m,
                              np.array([[0.5, 0.5], [0.5, 0.5]]))

    def test_three_states_tridiagonal(self):
        expected = np.array([[0.5, 0.5, 0.0],
                             [0.5, 0.0, 0.5],
                             [0.0, 0.5, 0.5]])
        assert np.array_equal(pc.birth_death_chain(3).m, expected)

    @pytest.mark.parametrize("n", [2, 3, 17, 256, 2048])
    def test_uniform_stationary(self, n):
        got = pc.stationary_of(pc.birth_death_chain(n))
        assert np.max(np.abs(got.p - 1.0 / n)) < 1e-10


class TestRandomPermutation:
    def test_single_state_identity(self):
        assert pc.random_permutation(1, 0).mapping.tolist() == [0]

    def test_seed_determinism(self):
        a = pc.random_permutation(12, 42).mapping
        b = pc.random_permutation(12, 42).mapping
        c = pc.random_permutation(12, 43).mapping
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_uniform_over_s4(self):
        # oracle: exhaustive enumeration of all 24 permutations
        import itertools

        draws = 100_000
        counts = {p: 0 for p in itertools.permutations(range(4))}
        for k in range(draws):
            counts[tuple(pc.random_permutation(4, k).mapping.tolist())] += 1
        freqs = np.array(list(counts.values())) / draws
        tv = 0.5 * np.abs(freqs - 1 / 24).sum()
        assert tv < 0.01


class TestMatrixFormat:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(17)
        p, pi = reversible_instance(5, rng)
        path = tmp_path / "chain.txt"
        pc.write_matrix(path, p, pi)
        back = pc.read_matrix(path)
        assert np.array_equal(back.m, p)
        assert np.array_equal(back.stationary.p, pi)

    def test_round_trip_without_pi(self, tmp_path):
        path = tmp_path / "chain.txt"
        pc.write_matrix(path, P3)
        back = pc.read_matrix(path)
        assert np.array_equal(back.m, P3)
        assert back.stationary is None

    def test_parse_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("n 2\n0.5 0.5\n0.5\n")
        from permchain.errors import ParseError

        with pytest.raises(ParseError) as err:
            pc.read_matrix(path)
        assert "line 3" in str(err.value)
