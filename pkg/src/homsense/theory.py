"""Numerical and enumerative checks of the unique-recovery theory at small scale.

The unlabeled-sensing solvers rest on algebraic facts about when a point of
a subspace can be identified from a shuffled, subsampled image: eigenspace
dimension bounds for permutations, a fixed-space criterion for invertible
maps, a measurement-count threshold (2n for all points, n+1 for generic
points), and a generic-intersection dimension formula.  None of those facts
are provable numerically, but all are falsifiable at small m by direct
eigen-decomposition and enumeration; this module implements those checks.

Everything runs over the complex field: real maps such as permutations are
rarely diagonalizable over the reals, and unique recovery over the
complexified subspace implies it over the real one.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .numerics import DEFAULT_RANK_TOL, as_matrix, kernel_basis

log = logging.getLogger(__name__)

ENDO_KINDS = ("permutation", "projection", "permutation_projection", "general")

# Enumerations over injective maps grow as m!/(m-k)! per side; cap the ambient
# dimension so full sweeps stay tractable.
MAX_ENUM_M = 9


@dataclass
class Endomorphism:
    """Square linear map with a structural kind tag.

    The tag is validated on construction: permutations must be 0/1 with one
    1 per row and column, projections idempotent, permutation-projections
    0/1 with at most one 1 per row and column.
    """

    matrix: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise PreconditionError("endomorphism matrix must be square")
        if not np.all(np.isfinite(self.matrix)):
            raise PreconditionError("endomorphism matrix contains non-finite entries")
        if self.kind not in ENDO_KINDS:
            raise PreconditionError(f"unknown kind {self.kind!r}; expected one of {ENDO_KINDS}")
        zero_one = np.all(np.isclose(self.matrix, 0) | np.isclose(self.matrix, 1))
        if self.kind == "permutation":
            ok = (
                zero_one
                and np.allclose(self.matrix.sum(axis=0), 1)
                and np.allclose(self.matrix.sum(axis=1), 1)
            )
            if not ok:
                raise PreconditionError("permutation kind requires exactly one 1 per row/column")
        elif self.kind == "projection":
            if not np.allclose(self.matrix @ self.matrix, self.matrix, atol=1e-12):
                raise PreconditionError("projection kind requires an idempotent matrix")
        elif self.kind == "permutation_projection":
            ok = (
                zero_one
                and np.all(self.matrix.sum(axis=0) <= 1 + 1e-12)
                and np.all(self.matrix.sum(axis=1) <= 1 + 1e-12)
            )
            if not ok:
                raise PreconditionError(
                    "permutation_projection kind requires a 0/1 matrix with at most one 1 "
                    "per row and column"
                )

    @property
    def m(self):
        return self.matrix.shape[0]


def permutation_endo(perm):
    """Endomorphism sending coordinate perm[i] to slot i ((Pv)[i] = v[perm[i]])."""
    perm = np.asarray(perm, dtype=np.intp)
    m = perm.size
    mat = np.zeros((m, m))
    mat[np.arange(m), perm] = 1.0
    return Endomorphism(mat, "permutation")


def projection_endo(keep, m):
    """Coordinate projection keeping the listed coordinates, zeroing the rest."""
    mat = np.zeros((m, m))
    keep = np.asarray(keep, dtype=np.intp)
    mat[keep, keep] = 1.0
    return Endomorphism(mat, "projection")


def unlabeled_endo(perm, keep):
    """Permutation followed by a coordinate projection (shuffle then subsample)."""
    pi = permutation_endo(perm)
    rho = projection_endo(keep, pi.m)
    return Endomorphism(rho.matrix @ pi.matrix, "permutation_projection")


@dataclass
class SubspaceBasis:
    """Orthonormal basis (columns) of an n-dimensional subspace of C^m."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2 or b.shape[0] < b.shape[1] or b.shape[1] < 1:
            raise PreconditionError("basis must be m x n with n <= m, n >= 1")
        gram = b.conj().T @ b
        if not np.allclose(gram, np.eye(b.shape[1]), atol=1e-12):
            raise PreconditionError("basis columns must be orthonormal")
        self.basis = b

    @property
    def m(self):
        return self.basis.shape[0]

    @property
    def n(self):
        return self.basis.shape[1]


def random_subspace(m, n, rng):
    """Orthonormalized standard-normal basis: a draw from the generic ensemble."""
    q, _ = np.linalg.qr(rng.standard_normal((m, n)))
    return SubspaceBasis(q)


def _cluster_eigenvalues(values, tol):
    """Greedy clustering of complex eigenvalues at tolerance ``tol``."""
    order = np.lexsort((values.imag, values.real))
    clusters = []
    for v in values[order]:
        for c in clusters:
            if abs(v - c[0] / c[1]) <= tol:
                c[0] += v
                c[1] += 1
                break
        else:
            clusters.append([v, 1])
    return [c[0] / c[1] for c in clusters]


def eigenspace_dims(tau, tol=1e-8, rank_tol=DEFAULT_RANK_TOL):
    """Geometric multiplicity of each eigenvalue cluster of ``tau``.

    Complex eigen-decomposition; eigenvalues within ``tol`` of each other are
    merged and each cluster's multiplicity is the numerical kernel dimension
    of (tau - lambda I).  Returns {eigenvalue: multiplicity}.
    """
    mat = tau.matrix.astype(complex)
    values = np.linalg.eigvals(mat)
    eye = np.eye(tau.m)
    dims = {}
    for lam in _cluster_eigenvalues(values, tol):
        dims[complex(lam)] = kernel_basis(mat - lam * eye, rank_tol).shape[1]
    return dims


def check_permutation_eigen_bound(pi, tol=1e-8):
    """Verify dim(eigenspace) <= m - floor(m/2) for every eigenvalue != 1.

    Returns (ok, worst) where worst is the (eigenvalue, dimension) pair of
    largest dimension among eigenvalues != 1, or None when there is none.
    """
    if pi.kind != "permutation":
        raise PreconditionError("expected a permutation endomorphism")
    bound = pi.m - pi.m // 2
    worst = None
    ok = True
    for lam, dim in eigenspace_dims(pi, tol).items():
        if abs(lam - 1) <= tol:
            continue
        if worst is None or dim > worst[1]:
            worst = (lam, dim)
        if dim > bound:
            ok = False
    return ok, worst


def _kernel_in_diagonal(m1, m2, tol):
    """True iff every solution of m1 @ x1 == m2 @ x2 has x1 == x2.

    Both matrices are k x n with full column rank intended; the kernel of
    [m1 | -m2] is computed and each orthonormal kernel vector (x1, x2) is
    required to sit on the diagonal x1 == x2 within ``tol``.
    """
    n = m1.shape[1]
    stacked = np.concatenate([m1, -m2], axis=1)
    kernel = kernel_basis(stacked, tol)
    if kernel.shape[1] == 0:
        return True
    diff = kernel[:n] - kernel[n:]
    return bool(np.all(np.linalg.norm(diff, axis=0) <= tol))


def pairwise_unique_recovery(v, tau1, tau2, tol=1e-8):
    """Can tau1(v1) == tau2(v2) with v1, v2 in the subspace only when v1 == v2?

    Every solution pair lives in the kernel of [tau1 V | -tau2 V]; the answer
    is yes exactly when that kernel lies in the diagonal subspace.
    """
    if tau1.m != v.m or tau2.m != v.m:
        raise PreconditionError("endomorphism and subspace dimensions differ")
    return _kernel_in_diagonal(tau1.matrix @ v.basis, tau2.matrix @ v.basis, tol)


def _injective_maps(m, k):
    count = 1
    for i in range(k):
        count *= m - i
    return (
        np.fromiter(
            itertools.chain.from_iterable(itertools.permutations(range(m), k)),
            dtype=np.intp,
            count=count * k,
        ).reshape(count, k),
        count,
    )


def _batched_nullity(mats, tol):
    """Numerical nullity of each matrix in a (batch, r, c) stack."""
    sv = np.linalg.svd(mats, compute_uv=False)
    cutoff = tol * sv[:, :1]
    rank = (sv > cutoff).sum(axis=1)
    return mats.shape[2] - rank


def enumerate_unlabeled_uniqueness(a_mat, k, tol=1e-8, chunk=50_000):
    """Exhaustively test unique recovery from k-of-m shuffled measurements.

    For every ordered pair (s1, s2) of injective maps [k] -> [m], solutions
    of A[s1] x1 == A[s2] x2 must force x1 == x2.  The pair test depends only
    on the set of index pairs {(s1(t), s2(t))}, so the enumeration is
    collapsed to its canonical form (s1 sorted increasing, s2 an arbitrary
    injective map), a k!-fold saving; the kernel-in-diagonal check reduces
    to comparing the nullity of [A[s1] | -A[s2]] with that of A[s1] - A[s2],
    which batches over thousands of pairs at once.

    Returns (ok, first_violation) where the violation is a pair of 0-based
    index tuples, or None.
    """
    a_mat = as_matrix(a_mat, "A")
    m, n = a_mat.shape
    if m > MAX_ENUM_M:
        raise PreconditionError(f"enumeration guard: need m <= {MAX_ENUM_M}, got {m}")
    if k > m or k < 1:
        raise PreconditionError(f"need 1 <= k <= m, got k={k}")
    maps, count = _injective_maps(m, k)
    a_all = a_mat[maps]  # (count, k, n)
    for subset in itertools.combinations(range(m), k):
        a1 = a_mat[list(subset)]
        for lo in range(0, count, chunk):
            hi = min(lo + chunk, count)
            a2 = a_all[lo:hi]
            stacked = np.concatenate(
                [np.broadcast_to(a1, a2.shape), -a2], axis=2
            )
            null_pair = _batched_nullity(stacked, tol)
            # Diagonal solutions (x, x) correspond to the kernel of the row
            # difference, so the kernel sits inside the diagonal exactly when
            # the two nullities agree.
            null_diag = _batched_nullity(a1[None] - a2, tol)
            bad = np.flatnonzero(null_pair != null_diag)
            if bad.size:
                j = int(bad[0])
                return False, (tuple(subset), tuple(maps[lo + j]))
    return True, None


def generic_point_recovery(a_mat, x_star, k, tol=1e-6, seed=0):
    """Can this particular point be recovered from k shuffled measurements?

    Forms y from a seeded random injective placement of k of the m values of
    A x_star, then solves the least-squares system of every injective map;
    recovery holds iff every map whose residual is <= tol * ||y|| yields
    x_star back (within tol).
    """
    a_mat = as_matrix(a_mat, "A")
    m, n = a_mat.shape
    if m > MAX_ENUM_M:
        raise PreconditionError(f"enumeration guard: need m <= {MAX_ENUM_M}, got {m}")
    if k > m or k < 1:
        raise PreconditionError(f"need 1 <= k <= m, got k={k}")
    x_star = np.asarray(x_star, dtype=float)
    rng = np.random.default_rng(seed)
    s_star = rng.choice(m, size=k, replace=False)
    y = (a_mat @ x_star)[s_star]
    maps, _ = _injective_maps(m, k)
    a_sel = a_mat[maps]  # (count, k, n)
    solutions = np.linalg.pinv(a_sel) @ y
    residuals = np.linalg.norm(a_sel @ solutions[..., None] - y[None, :, None], axis=(1, 2))
    consistent = residuals <= tol * np.linalg.norm(y)
    if not np.any(consistent):
        return False  # the planted map itself must be consistent; treat as failure
    errors = np.linalg.norm(solutions[consistent] - x_star, axis=1)
    return bool(np.all(errors <= tol))


def subspace_intersection_dim(b1, b2, tol=DEFAULT_RANK_TOL):
    """Numerical dimension of the intersection of two subspaces given by bases."""
    stacked = np.concatenate([b1, -b2], axis=1)
    return int(kernel_basis(stacked, tol).shape[1])


def generic_intersection_dim(w, n, trials=100, tol=DEFAULT_RANK_TOL, seed=0):
    """Observed dim(W intersect V) over random n-dim subspaces V.

    Returns a {dimension: count} histogram.  For a generic V the expected
    value in every trial is max(n + dim(W) - m, 0).
    """
    if n > w.m:
        raise PreconditionError("n must not exceed the ambient dimension")
    rng = np.random.default_rng(seed)
    hist = {}
    for _ in range(trials):
        v = random_subspace(w.m, n, rng)
        d = subspace_intersection_dim(w.basis, v.basis, tol)
        hist[d] = hist.get(d, 0) + 1
    return hist


def check_invertible_recovery_equivalence(v_basis, tau, tol=1e-8):
    """Fixed-space criterion vs. direct unique recovery, for invertible maps.

    For an invertible map, unique recovery in the subspace under {identity,
    tau} holds exactly when the intersection of the subspace with its image
    lies inside the fixed space of tau.  Returns (condition_holds,
    unique_recovery_holds); the two are asserted to agree, which is the
    content of the equivalence being checked.
    """
    basis = np.asarray(v_basis.basis if isinstance(v_basis, SubspaceBasis) else v_basis)
    q, _ = np.linalg.qr(basis.astype(complex))
    v = SubspaceBasis(q)
    mat = tau.matrix.astype(complex)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[-1] <= tol * sv[0]:
        raise PreconditionError("tau must be invertible for this criterion")

    # Basis of V intersect tau(V): kernel vectors (a, b) of [V | -tau V]
    # give intersection vectors V a; injectivity of V and tau makes them
    # independent.
    tv = mat @ v.basis
    kern = kernel_basis(np.concatenate([v.basis, -tv], axis=1), tol)
    condition_holds = True
    if kern.shape[1] > 0:
        vectors = v.basis @ kern[: v.n]
        q_int, r_int = np.linalg.qr(vectors)
        keep = np.abs(np.diag(r_int)) > tol
        for vec in q_int.T[keep]:
            if np.linalg.norm(mat @ vec - vec) > tol * np.linalg.norm(vec):
                condition_holds = False
                break

    identity = Endomorphism(np.eye(tau.m), "permutation")
    unique_recovery_holds = pairwise_unique_recovery(v, identity, tau, tol)
    if condition_holds != unique_recovery_holds:
        raise RuntimeError(
            "fixed-space criterion and direct recovery check disagree "
            f"({condition_holds} vs {unique_recovery_holds}); numerical tolerance issue?"
        )
    return condition_holds, unique_recovery_holds
