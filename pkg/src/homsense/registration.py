"""Affine point-set registration by branch-and-bound over the transform.

Jointly finds a 3x2 affine transform T (2x2 linear part stacked on a
translation row, applied to homogeneous model points) and an injective
correspondence from model points to scene points, minimizing the Frobenius
residual ||P T - S Q||_F.  Sorting no longer linearizes the matching in 2-d,
so the selection step uses an exact rectangular linear assignment instead of
the alignment DP;  everything else mirrors the vector solver: alternation
for upper bounds, center-residual-minus-Lipschitz lower bounds, best-first
box search over the 6 transform parameters.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .assign import lap_solve
from .bnb import BnbConfig, best_first_search
from .errors import PreconditionError
from .numerics import as_matrix, lstsq, sigma_max

log = logging.getLogger(__name__)


@dataclass
class RegistrationProblem:
    """Model set P (k x 3, homogeneous: third column all ones) and scene set Q (m x 2)."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.p = as_matrix(self.p, "P")
        self.q = as_matrix(self.q, "Q")
        if self.p.shape[1] != 3:
            raise PreconditionError("P must be k x 3 (homogeneous coordinates)")
        if not np.all(self.p[:, 2] == 1.0):
            raise PreconditionError("third column of P must be exactly 1")
        if self.q.shape[1] != 2:
            raise PreconditionError("Q must be m x 2")
        if self.p.shape[0] > self.q.shape[0]:
            raise PreconditionError(
                f"need k <= m (every model point has a scene counterpart), "
                f"got k={self.p.shape[0]}, m={self.q.shape[0]}"
            )

    @classmethod
    def from_points(cls, model_xy, scene_xy):
        """Build a problem from raw 2-d point arrays; homogenizes the model set."""
        model_xy = as_matrix(model_xy, "model")
        if model_xy.shape[1] != 2:
            raise PreconditionError("model points must be k x 2")
        p = np.column_stack([model_xy, np.ones(model_xy.shape[0])])
        return cls(p, scene_xy)

    @property
    def k(self):
        return self.p.shape[0]

    @property
    def m(self):
        return self.q.shape[0]


@dataclass
class AffineTransform:
    """3x2 affine map: rows 0-1 are the linear part, row 2 the translation."""

    t: np.ndarray

    def __post_init__(self):
        self.t = as_matrix(self.t, "T")
        if self.t.shape != (3, 2):
            raise PreconditionError("T must be 3 x 2")

    @property
    def linear(self):
        return self.t[:2]

    @property
    def translation(self):
        return self.t[2]

    def apply(self, points_xy):
        """Transform raw 2-d points: x @ linear + translation."""
        pts = as_matrix(points_xy, "points")
        return pts @ self.linear + self.translation


@dataclass
class RegistrationResult:
    transform: AffineTransform
    assignment: object
    residual: float
    nodes_expanded: int
    wall_time: float
    terminated_by: str


@dataclass
class RegAltMinResult:
    transform: AffineTransform
    assignment: object
    residual: float
    residuals: list


def _pairwise_sq_dists(pt, q):
    """(k, m) squared distances between transformed model points and scene points."""
    diff = pt[:, None, :] - q[None, :, :]
    return np.einsum("kmi,kmi->km", diff, diff)


def _frobenius_residual(prob, t, idx):
    return float(np.linalg.norm(prob.p @ t - prob.q[idx]))


def register_altmin(prob, t0, max_iters=50, tol=1e-9):
    """Alternate exact assignment (linear assignment on squared distances)
    with the closed-form least-squares transform fit; residual is monotone
    non-increasing."""
    t = np.asarray(t0.t if isinstance(t0, AffineTransform) else t0, dtype=float)
    if t.shape != (3, 2):
        raise PreconditionError("T0 must be 3 x 2")
    history = []
    assignment = None
    residual = np.inf
    prev = np.inf
    for _ in range(max_iters):
        assignment = lap_solve(_pairwise_sq_dists(prob.p @ t, prob.q)).map
        t = lstsq(prob.p, prob.q[assignment.idx])
        residual = _frobenius_residual(prob, t, assignment.idx)
        history.append(residual)
        if prev - residual < tol:
            break
        prev = residual
    return RegAltMinResult(AffineTransform(t), assignment, residual, history)


def _normalize(points):
    """Center and scale to unit RMS radius; returns (normalized, centroid, scale)."""
    mu = points.mean(axis=0)
    centered = points - mu
    scale = float(np.sqrt((centered**2).sum(axis=1).mean()))
    if scale == 0.0:
        scale = 1.0
    return centered / scale, mu, scale


def _denormalize_transform(t_norm, mu_p, s_p, mu_q, s_q):
    """Map a transform fitted on normalized coordinates back to the originals."""
    lin = (s_q / s_p) * t_norm[:2]
    trans = mu_q + s_q * t_norm[2] - mu_p @ lin
    return np.vstack([lin, trans])


def _diameter(points):
    diff = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2).max()))


def default_transform_box(prob):
    """[-B, B]^6 with B grown from the scene/model scale ratio."""
    dp = _diameter(prob.p[:, :2])
    dq = _diameter(prob.q)
    if dp == 0.0:
        raise PreconditionError("model set is degenerate (zero diameter)")
    b = 2.0 * (dq / dp + 1.0)
    return np.zeros(6), np.full(6, b)


def register_bnb(prob, box=None, cfg=None):
    """Branch-and-bound over the 6 transform parameters.

    ``box`` is an optional (center, half_widths) pair of length-6 arrays for
    the row-major flattening of T; when omitted, both point sets are
    normalized (centered, unit RMS radius) for conditioning, a data-scaled
    default box is used, and the fitted transform is mapped back to the
    original coordinates afterwards.  An explicit box is honored in the
    original coordinates without normalization, since axis-aligned boxes do
    not survive the change of variables.
    """
    if not isinstance(prob, RegistrationProblem):
        raise PreconditionError("prob must be a RegistrationProblem")
    cfg = cfg or BnbConfig()
    normalized = box is None
    if normalized:
        pn, mu_p, s_p = _normalize(prob.p[:, :2])
        qn, mu_q, s_q = _normalize(prob.q)
        work = RegistrationProblem(np.column_stack([pn, np.ones(prob.k)]), qn)
        center, half = default_transform_box(work)
    else:
        work = prob
        center, half = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
        if center.shape != (6,) or half.shape != (6,):
            raise PreconditionError("box center and half_widths must each have 6 entries")

    sigma1 = sigma_max(work.p)

    def evaluate(params):
        r = register_altmin(work, params.reshape(3, 2), cfg.altmin_max_iters, cfg.altmin_tol)
        return r.transform.t, r.assignment, r.residual

    def bound_at(params, half_diag):
        t = params.reshape(3, 2)
        res = float(np.sqrt(lap_solve(_pairwise_sq_dists(work.p @ t, work.q)).cost))
        return max(res - sigma1 * half_diag, 0.0)

    t_best, amap, _, nodes, wall, status, _ = best_first_search(
        center, half, cfg, evaluate, bound_at
    )

    if normalized:
        t_best = _denormalize_transform(t_best, mu_p, s_p, mu_q, s_q)
    residual = _frobenius_residual(prob, t_best, amap.idx)
    return RegistrationResult(AffineTransform(t_best), amap, residual, nodes, wall, status)
