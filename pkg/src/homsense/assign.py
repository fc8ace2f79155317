"""Optimal selection-map computation.

Two exact engines live here:

* a dynamic program over *strictly increasing* index maps (sequence
  alignment with skips, O(m*k) time), which after sorting both sequences in
  descending order also yields the optimum over *all* injective maps -- the
  workhorse inside the unlabeled-sensing solvers;
* an exact rectangular linear-assignment solver for arbitrary cost matrices,
  used by the registration solver where per-pair costs are 2-d distances and
  the sorting trick does not apply.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import PreconditionError
from .numerics import as_matrix, as_vector, sort_desc_perm


@dataclass
class AssignmentMap:
    """Injective index map ``t -> idx[t]`` from ``[k]`` into ``[m]`` (0-based).

    Row t of the equivalent selection matrix S picks coordinate ``idx[t]``;
    the map is order-preserving exactly when ``idx`` is strictly increasing.
    """

    m: int
    idx: np.ndarray

    def __post_init__(self):
        self.idx = np.asarray(self.idx, dtype=np.intp)
        if self.idx.ndim != 1 or self.idx.size < 1:
            raise PreconditionError("assignment map must be a non-empty 1-d index array")
        if self.idx.size > self.m:
            raise PreconditionError(f"map length {self.idx.size} exceeds range size {self.m}")
        if self.idx.min() < 0 or self.idx.max() >= self.m:
            raise PreconditionError(f"indices must lie in [0, {self.m})")
        if np.unique(self.idx).size != self.idx.size:
            raise PreconditionError("assignment map must be injective (duplicate index)")

    @property
    def k(self):
        return self.idx.size

    @property
    def is_order_preserving(self):
        return bool(np.all(np.diff(self.idx) > 0))

    def selection_matrix(self):
        """Dense k-by-m 0/1 selection matrix equivalent of the map."""
        s = np.zeros((self.k, self.m))
        s[np.arange(self.k), self.idx] = 1.0
        return s


@dataclass
class AlignResult:
    """Total cost plus the achieving injective map."""

    cost: float
    map: AssignmentMap


def _check_desc(v, name):
    if np.any(np.diff(v) > 0):
        raise PreconditionError(f"{name} must be sorted in non-increasing order")


def increasing_map_align(a, b):
    """Min of sum((a[i] - b[sigma(i)])^2) over strictly increasing sigma.

    Valid for arbitrary sequences; no sortedness is required or assumed.
    Recurrence over D[i][j] = best cost of placing the first i entries of
    ``a`` within the first j entries of ``b``:

        D[0][j] = 0,  D[i][j] = +inf for j < i,
        D[i][j] = min(D[i][j-1], D[i-1][j-1] + (a[i]-b[j])^2)

    Ties prefer the skip branch D[i][j-1], which makes the returned map the
    lexicographically smallest optimum.  O(m*k) time, O(m*k) memory (the
    match-candidate table is kept for backtracking).
    """
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    k, m = a.size, b.size
    if k > m:
        raise PreconditionError(f"need k <= m, got k={k}, m={m}")

    # cand[i][j] = D[i-1][j-1] + (a[i]-b[j])^2: cost of the best solution for
    # rows <= i whose last match is at column j.  D-rows are rolled in place.
    cand = np.empty((k, m))
    d = np.zeros(m + 1)
    for i in range(k):
        row = d[:m] + (a[i] - b) ** 2
        if i > 0:
            row[:i] = np.inf  # fewer candidates than entries placed so far
        cand[i] = row
        d = np.empty(m + 1)
        d[0] = np.inf
        np.minimum.accumulate(row, out=d[1:])
    cost = float(d[m])

    # Backtrack: the skip-preferring tie rule selects the leftmost minimizer
    # of each candidate row, scanning right-to-left under the j < sigma(i+1)
    # constraint.
    sigma = np.empty(k, dtype=np.intp)
    hi = m
    for i in range(k - 1, -1, -1):
        j = int(np.argmin(cand[i, :hi]))
        sigma[i] = j
        hi = j
    return AlignResult(cost, AssignmentMap(m, sigma))


def increasing_align_cost_batch(a, b_rows):
    """Cost-only variant of :func:`increasing_map_align` over many ``b`` rows.

    ``b_rows`` has one candidate sequence per row; returns one cost per row.
    Used by the enumeration solver, where millions of candidates are scored
    and only the winner needs backtracking.
    """
    a = as_vector(a, "a")
    b_rows = np.asarray(b_rows, dtype=float)
    if b_rows.ndim != 2:
        raise PreconditionError("b_rows must be 2-d")
    n_rows, m = b_rows.shape
    if a.size > m:
        raise PreconditionError(f"need k <= m, got k={a.size}, m={m}")
    d = np.zeros((n_rows, m + 1))
    for i in range(a.size):
        row = d[:, :m] + (a[i] - b_rows) ** 2
        if i > 0:
            row[:, :i] = np.inf
        np.minimum.accumulate(row, axis=1, out=row)
        d[:, 0] = np.inf
        d[:, 1:] = row
    return d[:, m]


def dp_align(a, b):
    """Optimal strictly-increasing alignment of two *descending* sequences.

    Both inputs must be sorted non-increasing (checked); with that
    precondition the returned cost is also the minimum over all injective
    maps of the sorted sequences.
    """
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    _check_desc(a, "a")
    _check_desc(b, "b")
    return increasing_map_align(a, b)


def recover_selection(y, z):
    """Best injective map s minimizing sum((y[t] - z[s(t)])^2), with its cost.

    Sorts both sequences in descending order, aligns them with the
    increasing-map DP, and composes the sort permutations back out.  The
    achieved cost equals the exhaustive minimum over all injective maps
    [k] -> [m] (validated against brute force in the test suite).
    """
    y = as_vector(y, "y")
    z = as_vector(z, "z")
    if y.size > z.size:
        raise PreconditionError(f"need len(y) <= len(z), got {y.size} > {z.size}")
    y_sorted, p = sort_desc_perm(y)
    z_sorted, q = sort_desc_perm(z)
    aligned = increasing_map_align(y_sorted, z_sorted)
    s = np.empty(y.size, dtype=np.intp)
    s[p] = q[aligned.map.idx]
    return AlignResult(aligned.cost, AssignmentMap(z.size, s))


def lap_solve(cost):
    """Exact rectangular linear assignment: min over injective maps of sum cost[t, s(t)].

    ``cost`` is k-by-m with k <= m.  Exactness is the contract; the
    shortest-augmenting-path solver used here is O(m^3)-class.
    """
    cost = as_matrix(cost, "cost")
    k, m = cost.shape
    if k > m:
        raise PreconditionError(f"need k <= m, got k={k}, m={m}")
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    idx = np.empty(k, dtype=np.intp)
    idx[rows] = cols
    total = float(cost[rows, cols].sum())
    return AlignResult(total, AssignmentMap(m, idx))
