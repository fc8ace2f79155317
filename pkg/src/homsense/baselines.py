"""Reference solvers the main algorithms are benchmarked against.

* ``altmin_sort``: alternating least squares and sort-based re-permutation
  for the fully-observed shuffled regression problem (k = m).
* ``robust_l1``: convex l1 robust regression treating shuffled entries as
  sparse outliers; exact coordinate alternation with a closed-form
  soft-threshold step.
* ``altmin_order_preserving``: alternating minimization whose selection step
  only searches strictly increasing maps on the raw (unsorted) sequences.
  Works when the true subsampling preserves order and is expected to fail
  under genuine shuffling; kept for comparison.
"""

import logging
import time

import numpy as np

from .assign import increasing_map_align, recover_selection, AssignmentMap
from .bnb import SolveResult
from .errors import PreconditionError
from .numerics import as_matrix, as_vector, lstsq, sort_desc_perm

log = logging.getLogger(__name__)


def _altmin_sort_once(a_mat, y, x0, max_iters, tol):
    x = np.asarray(x0, dtype=float)
    residual, perm = np.inf, None
    history = []
    prev = np.inf
    for _ in range(max_iters):
        _, p = sort_desc_perm(y)
        _, q = sort_desc_perm(a_mat @ x)
        perm = np.empty(y.size, dtype=np.intp)
        perm[p] = q  # pair i-th largest of y with i-th largest of Ax
        rows = a_mat[perm]
        x = lstsq(rows, y)
        residual = float(np.linalg.norm(y - rows @ x))
        history.append(residual)
        if prev - residual < tol:
            break
        prev = residual
    return x, perm, residual, history


def altmin_sort(a_mat, y, x0=None, max_iters=100, tol=1e-9):
    """Alternating least squares + sorting for the full-permutation case.

    The permutation step pairs the sorted orders of y and A x (the exact
    minimizer over permutations for fixed x), the x step is least squares,
    so the residual is monotone non-increasing.  When no ``x0`` is given,
    both signs of the plain least-squares fit are tried and the better final
    result returned: in one dimension the sorted pairing recovers the exact
    solution only when started on the correct side of zero.
    """
    a_mat = as_matrix(a_mat, "A")
    y = as_vector(y, "y")
    if y.size != a_mat.shape[0]:
        raise PreconditionError(
            f"altmin_sort requires k = m (full permutation), got k={y.size}, m={a_mat.shape[0]}"
        )
    start = time.perf_counter()
    if x0 is None:
        base = lstsq(a_mat, y)
        starts = [base, -base]
    else:
        starts = [np.asarray(x0, dtype=float)]
    best = None
    iters = 0
    for s in starts:
        x, perm, residual, history = _altmin_sort_once(a_mat, y, s, max_iters, tol)
        iters += len(history)
        if best is None or residual < best[2]:
            best = (x, perm, residual)
    x, perm, residual = best
    wall = time.perf_counter() - start
    status = "converged" if iters < max_iters * len(starts) else "max-iters"
    return SolveResult(x, AssignmentMap(y.size, perm), residual, iters, wall, status)


def soft_threshold(v, level):
    """Componentwise sign(v) * max(|v| - level, 0)."""
    return np.sign(v) * np.maximum(np.abs(v) - level, 0.0)


def robust_l1(a_mat, y, lam, max_iters=500, tol=1e-10):
    """Solve min over (x, e) of ||y - A x - sqrt(m) e||^2 + m * lam * ||e||_1.

    Exact alternation on a jointly convex objective: for fixed x the e-step
    is the closed-form componentwise soft-threshold of (y - A x) / sqrt(m)
    at level lam / 2 (derived by zeroing the subgradient of the separable
    quadratic-plus-l1 coordinate problems, and cross-checked against a
    generic convex solver in the tests); the x-step is least squares on the
    outlier-corrected observations.  Iterates until the objective decrease
    drops below ``tol``.  Returns the regression estimate x.
    """
    a_mat = as_matrix(a_mat, "A")
    y = as_vector(y, "y")
    if y.size != a_mat.shape[0]:
        raise PreconditionError("robust_l1 requires len(y) == rows of A")
    if lam <= 0:
        raise PreconditionError("lambda must be > 0")
    m = y.size
    root_m = np.sqrt(m)
    x = lstsq(a_mat, y)
    e = np.zeros(m)
    prev = np.inf
    for _ in range(max_iters):
        e = soft_threshold((y - a_mat @ x) / root_m, lam / 2.0)
        x = lstsq(a_mat, y - root_m * e)
        obj = float(np.linalg.norm(y - a_mat @ x - root_m * e) ** 2 + m * lam * np.abs(e).sum())
        if prev - obj < tol:
            break
        prev = obj
    return x


def altmin_order_preserving(a_mat, y, x0=None, max_iters=50, tol=1e-9):
    """Alternating minimization restricted to order-preserving selections.

    Identical to the unrestricted alternation except that the selection step
    runs the increasing-map DP directly on the raw sequences, never
    re-sorting them, so only strictly increasing maps are reachable.
    Reproduces the known failure mode on shuffled data while matching the
    unrestricted solver when the ground-truth selection preserves order.
    """
    a_mat = as_matrix(a_mat, "A")
    y = as_vector(y, "y")
    if y.size > a_mat.shape[0]:
        raise PreconditionError("need len(y) <= rows of A")
    start = time.perf_counter()
    x = np.zeros(a_mat.shape[1]) if x0 is None else np.asarray(x0, dtype=float)
    assignment = None
    residual = np.inf
    prev = np.inf
    iters = 0
    for iters in range(1, max_iters + 1):
        assignment = increasing_map_align(y, a_mat @ x).map
        rows = a_mat[assignment.idx]
        x = lstsq(rows, y)
        residual = float(np.linalg.norm(y - rows @ x))
        if prev - residual < tol:
            break
        prev = residual
    wall = time.perf_counter() - start
    status = "converged" if iters < max_iters else "max-iters"
    return SolveResult(x, assignment, residual, iters, wall, status)
