"""Brute-force enumeration solver for unlabeled sensing at small n.

Pins n observed values to every ordered n-tuple of measurement rows, solves
the resulting square system, and keeps the candidate whose full-vector
alignment cost is smallest.  O(k * m^(n+1)) overall; immune to the
subsampling ratio but exponential in n, so only practical for n <= 4.
"""

import itertools
import logging
import time

import numpy as np

from .assign import increasing_align_cost_batch, recover_selection
from .bnb import SolveResult, altmin_upper
from .errors import PreconditionError
from .numerics import as_matrix, as_vector

log = logging.getLogger(__name__)

# Refuse enumerations that would not fit in memory or finish in reasonable time.
MAX_TUPLES = 50_000_000


def _ordered_tuples(m, n):
    """All ordered n-tuples of distinct indices from [m], lexicographic."""
    count = 1
    for i in range(n):
        count *= m - i
    if count > MAX_TUPLES:
        raise PreconditionError(
            f"enumeration of {count} row tuples exceeds the supported size "
            f"({MAX_TUPLES}); reduce n or m"
        )
    return np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(m), n)),
        dtype=np.intp,
        count=count * n,
    ).reshape(count, n)


def solve_enum(a_mat, y, seed=0, cond_max=1e8, refine=True, restarts=1, chunk=8192):
    """Score every ordered n-row submatrix of A against a random n-subvector of y.

    A length-n index subset of y is drawn once per restart (seeded, sorted so
    the pinned values form a subvector); each well-conditioned n-by-n row
    tuple proposes a candidate x, scored by the optimal-alignment cost of
    (y, A x).  Ill-conditioned tuples (condition number above ``cond_max``)
    are skipped.  Ties break toward the lexicographically first tuple, so
    results are deterministic for a given seed regardless of chunking.  With
    ``refine`` the winner is polished by alternating minimization.
    """
    a_mat = as_matrix(a_mat, "A")
    y = as_vector(y, "y")
    m, n = a_mat.shape
    k = y.size
    if k < n:
        raise PreconditionError(f"need len(y) >= n, got {k} < {n}")
    if k > m:
        raise PreconditionError(f"need len(y) <= rows of A, got {k} > {m}")
    if restarts < 1:
        raise PreconditionError("restarts must be >= 1")

    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    tuples = _ordered_tuples(m, n)
    a_tuples = a_mat[tuples]  # (count, n, n)

    # Condition filter, batched.
    sv = np.linalg.svd(a_tuples, compute_uv=False)
    with np.errstate(divide="ignore"):
        cond = np.where(sv[:, -1] > 0, sv[:, 0] / sv[:, -1], np.inf)
    valid = cond <= cond_max
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise PreconditionError(
            f"every row tuple exceeded the condition-number threshold {cond_max:g}"
        )
    log.info("enumeration: %d/%d tuples pass conditioning", n_valid, tuples.shape[0])

    y_sorted = -np.sort(-y)
    scored = 0
    best_cost, best_x, best_tuple = np.inf, None, None

    for _ in range(restarts):
        sub = np.sort(rng.choice(k, size=n, replace=False))
        ybar = y[sub]
        xs = np.linalg.solve(a_tuples[valid], ybar)  # (n_valid, n)
        valid_rows = np.flatnonzero(valid)
        for lo in range(0, n_valid, chunk):
            hi = min(lo + chunk, n_valid)
            z = xs[lo:hi] @ a_mat.T  # (chunk, m)
            z_sorted = -np.sort(-z, axis=1)
            costs = increasing_align_cost_batch(y_sorted, z_sorted)
            scored += hi - lo
            j = int(np.argmin(costs))
            if costs[j] < best_cost:
                best_cost = float(costs[j])
                best_x = xs[lo + j]
                best_tuple = tuples[valid_rows[lo + j]]

    log.debug("enumeration winner tuple %s, scan cost %.3e", best_tuple, best_cost)
    if refine:
        refined = altmin_upper(a_mat, y, best_x)
        x_hat, assignment, residual = refined.x, refined.assignment, refined.residual
    else:
        aligned = recover_selection(y, a_mat @ best_x)
        x_hat, assignment, residual = best_x, aligned.map, float(np.sqrt(aligned.cost))

    wall = time.perf_counter() - start
    return SolveResult(x_hat, assignment, residual, scored, wall, "enumerated")
