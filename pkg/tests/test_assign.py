import numpy as np
import pytest

from conftest import brute_force_lap_cost, brute_force_selection_cost
from homsense.assign import (
    AssignmentMap,
    dp_align,
    increasing_align_cost_batch,
    increasing_map_align,
    lap_solve,
    recover_selection,
)
from homsense.errors import PreconditionError


class TestAssignmentMap:
    def test_injectivity_enforced(self):
        with pytest.raises(PreconditionError):
            AssignmentMap(4, [0, 0, 1])

    def test_bounds_enforced(self):
        with pytest.raises(PreconditionError):
            AssignmentMap(3, [0, 3])

    def test_order_preserving_flag(self):
        assert AssignmentMap(5, [0, 2, 4]).is_order_preserving
        assert not AssignmentMap(5, [2, 0, 4]).is_order_preserving

    def test_selection_matrix(self):
        s = AssignmentMap(3, [2, 0]).selection_matrix()
        assert s.tolist() == [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]


class TestDpAlign:
    def test_identity_case(self):
        r = dp_align(np.array([2.0, 1.0]), np.array([2.0, 1.0]))
        assert r.cost == 0.0
        assert r.map.idx.tolist() == [0, 1]

    def test_single_entry(self):
        # candidate costs are 4, 1, 4; middle match wins
        r = dp_align(np.array([3.0]), np.array([5.0, 2.0, 1.0]))
        assert r.cost == pytest.approx(1.0)
        assert r.map.idx.tolist() == [1]

    def test_skip_in_middle(self):
        # increasing pairs cost 4, 0, 4; the (0, 2) pair is exact
        r = dp_align(np.array([5.0, 1.0]), np.array([5.0, 3.0, 1.0]))
        assert r.cost == 0.0
        assert r.map.idx.tolist() == [0, 2]

    def test_k_greater_than_m_rejected(self):
        with pytest.raises(PreconditionError):
            dp_align(np.array([2.0, 1.0]), np.array([1.0]))

    def test_unsorted_rejected(self):
        with pytest.raises(PreconditionError):
            dp_align(np.array([1.0, 2.0]), np.array([3.0, 1.0]))
        with pytest.raises(PreconditionError):
            dp_align(np.array([2.0, 1.0]), np.array([1.0, 3.0]))

    def test_cost_matches_map(self, rng):
        for _ in range(100):
            m = int(rng.integers(1, 9))
            k = int(rng.integers(1, m + 1))
            a = -np.sort(-rng.normal(size=k))
            b = -np.sort(-rng.normal(size=m))
            r = dp_align(a, b)
            assert r.map.is_order_preserving
            assert r.cost == pytest.approx(((a - b[r.map.idx]) ** 2).sum(), abs=1e-12)

    def test_monotone_in_candidates(self, rng):
        # appending one more candidate never increases the optimum
        for _ in range(100):
            k, m = int(rng.integers(1, 5)), int(rng.integers(5, 9))
            a = -np.sort(-rng.normal(size=k))
            b = -np.sort(-rng.normal(size=m))
            full = dp_align(a, b).cost
            trimmed = dp_align(a, b[:-1]).cost if m - 1 >= k else np.inf
            assert full <= trimmed + 1e-12


class TestIncreasingMapAlign:
    def test_no_sortedness_required(self):
        r = increasing_map_align(np.array([1.0, 5.0]), np.array([1.0, 2.0, 5.0]))
        assert r.cost == 0.0
        assert r.map.idx.tolist() == [0, 2]

    def test_brute_force_over_increasing_maps(self, rng):
        import itertools

        for _ in range(100):
            k, m = int(rng.integers(1, 5)), int(rng.integers(4, 8))
            a, b = rng.normal(size=k), rng.normal(size=m)
            best = min(
                ((a - b[list(c)]) ** 2).sum()
                for c in itertools.combinations(range(m), k)
            )
            assert increasing_map_align(a, b).cost == pytest.approx(best, abs=1e-12)


class TestRecoverSelection:
    def test_cross_match_example(self):
        r = recover_selection(np.array([1.0, 3.0]), np.array([3.0, 0.0, 1.0]))
        assert r.cost == 0.0
        assert r.map.idx.tolist() == [2, 0]

    def test_identical_vectors(self, rng):
        y = rng.normal(size=6)
        r = recover_selection(y, y)
        assert r.cost == pytest.approx(0.0, abs=1e-15)

    def test_subvector_of_permutation_is_exact(self, rng):
        for _ in range(50):
            m = int(rng.integers(3, 9))
            k = int(rng.integers(1, m + 1))
            z = rng.normal(size=m)
            y = z[rng.choice(m, size=k, replace=False)]
            assert recover_selection(y, z).cost == pytest.approx(0.0, abs=1e-15)

    def test_exhaustive_oracle(self, rng):
        # the module's core correctness claim: sorted DP == global optimum
        for _ in range(500):
            k = int(rng.integers(1, 6))
            m = int(rng.integers(k, 9))
            z = rng.normal(size=m)
            if rng.random() < 0.5:
                y = z[rng.choice(m, size=k, replace=False)]
                y = y + rng.choice([0.0, 0.01, 0.5]) * rng.normal(size=k)
            else:
                y = rng.normal(size=k)
            got = recover_selection(y, z)
            want = brute_force_selection_cost(y, z)
            assert abs(got.cost - want) <= 1e-12
            assert got.cost == pytest.approx(((y - z[got.map.idx]) ** 2).sum(), abs=1e-12)

    def test_k_greater_than_m_rejected(self):
        with pytest.raises(PreconditionError):
            recover_selection(np.zeros(3), np.zeros(2))


class TestBatchCosts:
    def test_matches_single(self, rng):
        for _ in range(30):
            k, m = int(rng.integers(1, 6)), int(rng.integers(6, 10))
            a = -np.sort(-rng.normal(size=k))
            rows = -np.sort(-rng.normal(size=(9, m)), axis=1)
            costs = increasing_align_cost_batch(a, rows)
            for i in range(rows.shape[0]):
                assert costs[i] == pytest.approx(dp_align(a, rows[i]).cost, abs=1e-12)


class TestLapSolve:
    def test_zero_diagonal(self):
        cost = 1.0 - np.eye(3)
        r = lap_solve(cost)
        assert r.map.idx.tolist() == [0, 1, 2]
        assert r.cost == 0.0

    def test_two_by_two(self):
        r = lap_solve(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert r.map.idx.tolist() == [0, 1]
        assert r.cost == pytest.approx(2.0)

    def test_exhaustive_oracle(self, rng):
        for _ in range(200):
            k = int(rng.integers(1, 7))
            m = int(rng.integers(k, 8))
            cost = rng.normal(size=(k, m))
            got = lap_solve(cost)
            assert got.cost == pytest.approx(brute_force_lap_cost(cost), abs=1e-12)

    def test_rectangular_guard(self):
        with pytest.raises(PreconditionError):
            lap_solve(np.zeros((3, 2)))

    def test_non_finite(self):
        with pytest.raises(PreconditionError):
            lap_solve(np.array([[np.inf, 1.0]]))
