"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's own algorithms: costs are
enumerated over explicit itertools permutations so DP/LAP results are
checked against an implementation that shares no code with them.
"""

import itertools
from pathlib import Path

import numpy as np
import pytest

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def brute_force_selection_cost(y, z):
    """Exhaustive min of sum((y[t] - z[s(t)])^2) over injective maps s."""
    k, m = len(y), len(z)
    best = np.inf
    for perm in itertools.permutations(range(m), k):
        cost = 0.0
        for t in range(k):
            d = y[t] - z[perm[t]]
            cost += d * d
        best = min(best, cost)
    return best


def brute_force_lap_cost(cost_matrix):
    """Exhaustive min of sum(cost[t, s(t)]) over injective maps s."""
    k, m = cost_matrix.shape
    best = np.inf
    for perm in itertools.permutations(range(m), k):
        total = sum(cost_matrix[t, perm[t]] for t in range(k))
        best = min(best, total)
    return best


def brute_force_full_permutation_solve(a_mat, y, lstsq_fn):
    """Min over all full permutations of the least-squares residual, with x."""
    m = len(y)
    best = (np.inf, None)
    for perm in itertools.permutations(range(m)):
        rows = a_mat[list(perm)]
        x = lstsq_fn(rows, y)
        res = float(np.linalg.norm(y - rows @ x))
        if res < best[0]:
            best = (res, x)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
