"""Globally minimize ||y - S A x||_2 over (x, S) by branch-and-bound on x only.

Branching over selection matrices is intractable; instead each candidate x
gets its optimal selection from the O(m*k) sorted alignment, and the search
bisects boxes in x-space.  A box with center c and half-diagonal e admits the
lower bound max(r(c) - sigma_max(A) * e, 0) on the achievable residual inside
it, since the pointwise-optimal residual is sigma_max(A)-Lipschitz in x.
Upper bounds (incumbents) come from alternating minimization started at box
centers.
"""

import heapq
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assign import recover_selection
from .errors import PreconditionError
from .numerics import as_matrix, as_vector, lstsq, sigma_max, sigma_min_positive

log = logging.getLogger(__name__)

# Incumbents below this absolute slack are treated as exact zeros by the
# pruning test, so noiseless runs can certify optimality despite float fuzz.
PRUNE_SLACK = 1e-12


@dataclass
class BnbConfig:
    """Search parameters shared by the vector and registration solvers.

    ``center``/``half_widths`` override the data-derived initial box.
    ``gap_tol`` is the optimality gap at which the search may stop; 0 demands
    certified optimality up to the leaf-box bound.  ``prune=False`` disables
    lower-bound pruning entirely (pure exhaustive refinement; test hook).
    """

    center: np.ndarray | None = None
    half_widths: np.ndarray | None = None
    max_depth: int = 6
    time_budget: float | None = None
    altmin_max_iters: int = 50
    altmin_tol: float = 1e-9
    gap_tol: float = 0.0
    prune: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.max_depth < 0:
            raise PreconditionError("max_depth must be >= 0")
        if self.altmin_tol < 0 or self.gap_tol < 0:
            raise PreconditionError("tolerances must be >= 0")
        if self.workers < 1:
            raise PreconditionError("workers must be >= 1")


@dataclass
class HypercubeNode:
    """Axis-aligned box with its cached bound and center evaluation."""

    center: np.ndarray
    half_widths: np.ndarray
    depth: int
    lower_bound: float = np.inf
    upper_x: np.ndarray | None = None
    upper_cost: float | None = None

    @property
    def half_diagonal(self):
        return float(np.linalg.norm(self.half_widths))


@dataclass
class SolveResult:
    """Estimate, its selection map, and run statistics."""

    x_hat: np.ndarray
    assignment: object  # AssignmentMap
    residual: float
    nodes_expanded: int
    wall_time: float
    terminated_by: str
    best_history: list = field(default_factory=list)


@dataclass
class AltMinResult:
    x: np.ndarray
    assignment: object
    residual: float
    residuals: list


def altmin_upper(a_mat, y, x0=None, max_iters=50, tol=1e-9):
    """Alternating minimization between x and the selection map.

    Each half-step is an exact minimization (optimal injective map given x,
    least squares given the map), so the residual never increases.  Stops
    when the residual decrease falls below ``tol`` or after ``max_iters``.
    """
    a_mat = as_matrix(a_mat, "A")
    y = as_vector(y, "y")
    if y.size > a_mat.shape[0]:
        raise PreconditionError("need len(y) <= rows of A")
    x = np.zeros(a_mat.shape[1]) if x0 is None else np.asarray(x0, dtype=float)
    history = []
    assignment = None
    prev = np.inf
    residual = np.inf
    for _ in range(max_iters):
        assignment = recover_selection(y, a_mat @ x).map
        rows = a_mat[assignment.idx]
        x = lstsq(rows, y)
        residual = float(np.linalg.norm(y - rows @ x))
        history.append(residual)
        if prev - residual < tol:
            break
        prev = residual
    return AltMinResult(x, assignment, residual, history)


def lower_bound(center_residual, sigma1, box_half_diagonal):
    """Residual lower bound over a box from its center's optimal residual."""
    if center_residual < 0 or sigma1 < 0 or box_half_diagonal < 0:
        raise PreconditionError("lower_bound arguments must be >= 0")
    return max(center_residual - sigma1 * box_half_diagonal, 0.0)


def default_box(a_mat, y):
    """Data-derived initial box: centered at 0, generously covering solutions.

    Any exact solution satisfies ||x|| <= ||pinv(A_rows)|| * ||y|| for some
    row subset; 3 * ||y|| / sigma_min+(A) per coordinate is deliberate slack.
    """
    half = 3.0 * float(np.linalg.norm(y)) / sigma_min_positive(a_mat)
    n = a_mat.shape[1]
    return np.zeros(n), np.full(n, half)


def _split(node):
    """Bisect along the longest edge (lowest index on ties)."""
    j = int(np.argmax(node.half_widths))
    children = []
    for sign in (-1.0, 1.0):
        c = node.center.copy()
        h = node.half_widths.copy()
        h[j] *= 0.5
        c[j] += sign * h[j]
        children.append(HypercubeNode(c, h, node.depth + 1))
    return children


def best_first_search(center, half_widths, cfg, evaluate, bound_at):
    """Generic best-first branch-and-bound engine.

    ``evaluate(center) -> (estimate, assignment, residual)`` refines an upper
    bound; ``bound_at(center, half_diagonal) -> float`` is the box lower
    bound, built from the map-optimal residual at the center (no
    refinement).  Returns the incumbent plus statistics; shared by the
    vector solver and the registration solver.

    Queue order is (lower bound, deeper first, FIFO).  Termination statuses:
    ``budget`` (time limit), ``gap`` (every remaining box is within gap_tol
    of the incumbent), ``depth`` (queue drained but some boxes hit the depth
    cap unsplit), ``exhausted`` (queue drained with nothing truncated).
    """
    center = np.asarray(center, dtype=float)
    half_widths = np.asarray(half_widths, dtype=float)
    if center.ndim != 1 or half_widths.shape != center.shape:
        raise PreconditionError("box center and half_widths must be 1-d and congruent")
    if center.size == 0 or np.any(half_widths <= 0):
        raise PreconditionError("initial box must be non-empty with positive half-widths")

    start = time.perf_counter()
    root = HypercubeNode(center.copy(), half_widths.copy(), 0)
    root.lower_bound = bound_at(root.center, root.half_diagonal)
    counter = 0
    heap = [(root.lower_bound, -root.depth, counter, root)]

    best_x, best_map, best_res = None, None, np.inf
    best_history = []
    nodes_expanded = 0
    truncated = False
    status = "exhausted"
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None

    try:
        while heap:
            if cfg.time_budget is not None and time.perf_counter() - start > cfg.time_budget:
                status = "budget"
                break
            batch = [heapq.heappop(heap) for _ in range(min(cfg.workers, len(heap)))]
            if pool is not None:
                evals = list(pool.map(lambda e: evaluate(e[3].center), batch))
            else:
                evals = [evaluate(entry[3].center) for entry in batch]
            stop = False
            for (_, _, _, node), (x, amap, res) in zip(batch, evals):
                nodes_expanded += 1
                node.upper_x, node.upper_cost = x, res
                if res < best_res:
                    best_x, best_map, best_res = x, amap, res
                best_history.append(best_res)
                if cfg.prune and node.lower_bound >= best_res - cfg.gap_tol - PRUNE_SLACK:
                    # Heap is keyed by lower bound, so every remaining box is
                    # also within the gap: certified, stop.
                    status = "gap"
                    stop = True
                    break
                if node.depth >= cfg.max_depth:
                    truncated = True
                    continue
                for child in _split(node):
                    child.lower_bound = bound_at(child.center, child.half_diagonal)
                    counter += 1
                    heapq.heappush(heap, (child.lower_bound, -child.depth, counter, child))
            if stop:
                break
        else:
            status = "depth" if truncated else "exhausted"
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    wall = time.perf_counter() - start
    log.info("branch-and-bound: %d nodes, residual %.3e, %s", nodes_expanded, best_res, status)
    return best_x, best_map, best_res, nodes_expanded, wall, status, best_history


def solve_bnb(a_mat, y, cfg=None):
    """Branch-and-bound solver for min over (x, injective map) of ||y - A[s] x||.

    On termination with an empty queue, gap_tol 0 and no depth truncation,
    the returned residual is within sigma_max(A) * (smallest leaf
    half-diagonal) of the global minimum over the initial box.
    """
    a_mat = as_matrix(a_mat, "A")
    y = as_vector(y, "y")
    if y.size > a_mat.shape[0]:
        raise PreconditionError(f"need len(y) <= rows of A, got {y.size} > {a_mat.shape[0]}")
    cfg = cfg or BnbConfig()
    if cfg.center is not None or cfg.half_widths is not None:
        if cfg.center is None or cfg.half_widths is None:
            raise PreconditionError("give both box center and half_widths, or neither")
        center, half = np.asarray(cfg.center, float), np.asarray(cfg.half_widths, float)
    else:
        center, half = default_box(a_mat, y)
    sigma1 = sigma_max(a_mat)

    def evaluate(x0):
        r = altmin_upper(a_mat, y, x0, cfg.altmin_max_iters, cfg.altmin_tol)
        return r.x, r.assignment, r.residual

    def center_res(x0, half_diag):
        res = float(np.sqrt(recover_selection(y, a_mat @ x0).cost))
        return lower_bound(res, sigma1, half_diag)

    x, amap, res, nodes, wall, status, hist = best_first_search(
        center, half, cfg, evaluate, center_res
    )
    return SolveResult(x, amap, res, nodes, wall, status, hist)
