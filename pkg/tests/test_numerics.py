import numpy as np
import pytest

from homsense.errors import PreconditionError
from homsense.numerics import (
    kernel_basis,
    lstsq,
    sigma_max,
    sigma_min_positive,
    sort_desc_perm,
)


class TestLstsq:
    def test_identity(self):
        assert np.allclose(lstsq(np.eye(2), np.array([3.0, 4.0])), [3.0, 4.0])

    def test_mean_of_two_equations(self):
        x = lstsq(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
        assert np.allclose(x, [2.0])

    def test_round_trip(self, rng):
        m = rng.normal(size=(6, 3))
        x_true = np.array([1.0, 2.0, 3.0])
        x = lstsq(m, m @ x_true)
        assert np.abs(x - x_true).max() < 1e-10

    def test_minimum_norm_when_rank_deficient(self, rng):
        # duplicate column: solutions form a line, smallest norm is returned
        col = rng.normal(size=5)
        m = np.column_stack([col, col])
        x = lstsq(m, 2.0 * col)
        assert np.allclose(x, [1.0, 1.0], atol=1e-10)

    def test_residual_optimality_under_perturbation(self, rng):
        for _ in range(200):
            r, c = rng.integers(3, 9), rng.integers(1, 3)
            m = rng.normal(size=(r, int(c)))
            b = rng.normal(size=r)
            x = lstsq(m, b)
            base = np.linalg.norm(m @ x - b)
            for _ in range(20):
                d = rng.normal(size=x.shape)
                d *= 1e-3 / np.linalg.norm(d)
                assert np.linalg.norm(m @ (x + d) - b) >= base - 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(PreconditionError):
            lstsq(np.eye(3), np.array([1.0, 2.0]))

    def test_non_finite(self):
        with pytest.raises(PreconditionError):
            lstsq(np.array([[np.nan, 1.0]]), np.array([1.0]))


class TestSigmaMax:
    def test_identity(self):
        assert sigma_max(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert sigma_max(np.diag([2.0, 5.0, 1.0])) == pytest.approx(5.0)

    def test_rank_one(self):
        # column (3, 4): sqrt of the max eigenvalue of M^T M = 25
        assert sigma_max(np.array([[3.0, 0.0], [4.0, 0.0]])) == pytest.approx(5.0)

    def test_power_iteration_oracle(self, rng):
        m = rng.normal(size=(7, 4))
        best = max(
            (rng.normal(size=4) for _ in range(100)),
            key=lambda u: np.linalg.norm(m @ (u / np.linalg.norm(u))),
        )
        u = best / np.linalg.norm(best)
        gram = m.T @ m
        for _ in range(500):
            u = gram @ u
            u /= np.linalg.norm(u)
        assert sigma_max(m) == pytest.approx(np.linalg.norm(m @ u), abs=1e-6)

    def test_non_finite(self):
        with pytest.raises(PreconditionError):
            sigma_max(np.array([[np.inf]]))


class TestSigmaMinPositive:
    def test_full_rank(self):
        assert sigma_min_positive(np.diag([4.0, 2.0])) == pytest.approx(2.0)

    def test_skips_null_directions(self):
        assert sigma_min_positive(np.diag([3.0, 0.0])) == pytest.approx(3.0)

    def test_zero_matrix(self):
        with pytest.raises(PreconditionError):
            sigma_min_positive(np.zeros((2, 2)))


class TestKernelBasis:
    def test_full_rank_empty(self):
        assert kernel_basis(np.eye(2)).shape == (2, 0)

    def test_zero_matrix(self):
        basis = kernel_basis(np.zeros((2, 2)))
        assert basis.shape == (2, 2)
        assert np.allclose(basis.T @ basis, np.eye(2), atol=1e-12)

    def test_single_row(self):
        basis = kernel_basis(np.array([[1.0, -1.0]]))
        assert basis.shape == (2, 1)
        direction = np.array([1.0, 1.0]) / np.sqrt(2.0)
        assert min(
            np.linalg.norm(basis[:, 0] - direction),
            np.linalg.norm(basis[:, 0] + direction),
        ) < 1e-12

    def test_kernel_property(self, rng):
        tol = 1e-9
        for _ in range(50):
            r, c = int(rng.integers(2, 7)), int(rng.integers(2, 7))
            rank = int(rng.integers(1, min(r, c) + 1))
            m = rng.normal(size=(r, rank)) @ rng.normal(size=(rank, c))
            basis = kernel_basis(m, tol)
            assert basis.shape[1] == c - rank
            if basis.shape[1]:
                s1 = sigma_max(m)
                assert np.linalg.norm(m @ basis, axis=0).max() <= 10 * tol * s1
                gram = basis.T @ basis
                assert np.abs(gram - np.eye(basis.shape[1])).max() < 1e-10

    def test_tol_must_be_positive(self):
        with pytest.raises(PreconditionError):
            kernel_basis(np.eye(2), tol=0.0)


class TestSortDescPerm:
    def test_basic(self):
        sorted_v, perm = sort_desc_perm(np.array([1.0, 3.0, 2.0]))
        assert sorted_v.tolist() == [3.0, 2.0, 1.0]
        assert perm.tolist() == [1, 2, 0]

    def test_tie_break_ascending_index(self):
        _, perm = sort_desc_perm(np.array([5.0, 5.0]))
        assert perm.tolist() == [0, 1]

    def test_random_property(self, rng):
        v = rng.normal(size=100)
        sorted_v, perm = sort_desc_perm(v)
        assert np.all(np.diff(sorted_v) <= 0)
        assert np.array_equal(np.sort(perm), np.arange(100))
        assert np.array_equal(sorted_v, v[perm])

    def test_non_finite(self):
        with pytest.raises(PreconditionError):
            sort_desc_perm(np.array([1.0, np.nan]))
