"""Dense linear-algebra primitives shared by every solver in the package.

Thin, validated wrappers around LAPACK-backed numpy/scipy routines.  All
functions are pure; inputs are plain numpy arrays (real by default, complex
accepted where eigen-analysis needs it).
"""

import numpy as np
import scipy.linalg

from .errors import PreconditionError

# Relative singular-value cutoff used for rank decisions unless overridden.
DEFAULT_RANK_TOL = 1e-9


def as_matrix(m, name="matrix"):
    """Validate and return ``m`` as a finite 2-d array with >= 1 row and column."""
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise PreconditionError(
            f"{name} must be 2-d with at least one row and one column, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} contains non-finite entries")
    return arr


def as_vector(v, name="vector"):
    """Validate and return ``v`` as a finite 1-d array of length >= 1."""
    arr = np.asarray(v)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise PreconditionError(f"{name} must be 1-d and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} contains non-finite entries")
    return arr


def lstsq(m, b):
    """Minimum-norm least-squares solution of ``m @ x ~= b``.

    Among all minimizers of ``||m @ x - b||_2`` returns the one of smallest
    ``||x||_2`` (SVD-based, so rank deficiency is handled).  ``b`` may be a
    vector or a matrix of stacked right-hand-side columns.
    """
    m = as_matrix(m)
    b_arr = np.asarray(b)
    if b_arr.ndim == 1:
        b_arr = as_vector(b_arr, "b")
    else:
        b_arr = as_matrix(b_arr, "b")
    if b_arr.shape[0] != m.shape[0]:
        raise PreconditionError(
            f"dimension mismatch: matrix has {m.shape[0]} rows, b has {b_arr.shape[0]}"
        )
    x, _, _, _ = scipy.linalg.lstsq(m, b_arr, lapack_driver="gelsd")
    return x


def singular_values(m):
    """All singular values of ``m``, in non-increasing order."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def sigma_max(m):
    """Largest singular value of ``m``."""
    return float(singular_values(m)[0])


def sigma_min_positive(m, tol=DEFAULT_RANK_TOL):
    """Smallest singular value above the numerical-rank cutoff ``tol * sigma_max``.

    Raises if the matrix is numerically zero.
    """
    sv = singular_values(m)
    keep = sv[sv > tol * sv[0]]
    if keep.size == 0:
        raise PreconditionError("matrix is numerically zero; no positive singular value")
    return float(keep[-1])


def kernel_basis(m, tol=DEFAULT_RANK_TOL):
    """Orthonormal basis of the numerical null space of ``m``.

    Returns an array whose columns span ``{x : ||m @ x|| <= tol * sigma_max(m) * ||x||}``
    (the right singular vectors whose singular values fall at or below the
    cutoff).  Shape is ``(cols, nullity)``; the second dimension is 0 when the
    matrix has full numerical column rank.  Accepts real or complex input.
    """
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise PreconditionError(f"matrix must be 2-d and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or (
        np.iscomplexobj(arr) and not np.all(np.isfinite(arr.imag))
    ):
        raise PreconditionError("matrix contains non-finite entries")
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    return scipy.linalg.null_space(arr, rcond=tol)


def sort_desc_perm(v):
    """Sort ``v`` in non-increasing order; also return the index map used.

    Returns ``(sorted, perm)`` with ``sorted[i] == v[perm[i]]``.  Ties are
    broken by ascending original index, so the result is deterministic.
    """
    v = as_vector(v)
    perm = np.argsort(-v, kind="stable")
    return v[perm], perm
