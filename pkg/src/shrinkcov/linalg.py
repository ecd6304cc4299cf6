"""Dense matrix primitives used throughout the package.

Data matrices are plain ``numpy`` arrays of shape ``(n_obs, n_vars)`` with one
observation per row. Symmetric matrices are square ``float64`` arrays. The
helpers here validate those conventions once so the estimators can assume them.
"""

import numpy as np
from scipy import linalg as sla

from ._errors import DataError, NumericalError

# Relative floor below which a negative eigenvalue is treated as a genuine
# indefiniteness rather than round-off.
PSD_EIG_TOL = 1e-10


def as_data_matrix(data, *, name="data"):
    """Validate and return ``data`` as a 2-D float64 array (rows = observations)."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"{name} must be a 2-D array, got {arr.ndim} dimensions")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"{name} has a zero dimension: shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return arr


def as_sym_matrix(a, *, name="matrix"):
    """Return ``a`` as a symmetric float64 array, enforcing exact symmetry."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DataError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return 0.5 * (arr + arr.T)


def sample_covariance(data, centered=False):
    """Sample covariance matrix of the rows of ``data``.

    Parameters
    ----------
    data : array_like, shape (N, p)
        Observations in rows.
    centered : bool
        If False, subtract the sample mean and divide by ``N - 1``. If True the
        data are taken to have known mean zero: no mean is subtracted and the
        divisor is ``N``.

    Returns
    -------
    ndarray, shape (p, p)
    """
    x = as_data_matrix(data)
    n = x.shape[0]
    if centered:
        s = x.T @ x / n
    else:
        if n < 2:
            raise DataError("sample covariance requires at least 2 observations")
        xc = x - x.mean(axis=0)
        s = xc.T @ xc / (n - 1)
    return 0.5 * (s + s.T)


def scaled_frobenius_sq(a):
    """``tr(A^T A) / p``, the squared Frobenius norm scaled by dimension."""
    a = np.asarray(a, dtype=np.float64)
    p = a.shape[0]
    return float(np.sum(np.square(a), dtype=np.longdouble) / p)


def sym_sqrt(a):
    """Symmetric positive semidefinite square root via eigendecomposition.

    Eigenvalues in ``[-1e-10 * max_eig, 0)`` are clamped to zero; anything more
    negative raises :class:`NumericalError`.
    """
    a = as_sym_matrix(a)
    w, v = np.linalg.eigh(a)
    top = max(float(w[-1]), 0.0)
    if w[0] < -PSD_EIG_TOL * top or (top == 0.0 and w[0] < 0.0):
        raise NumericalError(
            f"matrix is not positive semidefinite (smallest eigenvalue {w[0]:.3e})"
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return 0.5 * (root + root.T)


def chol_pd_check(a):
    """True iff a Cholesky factorisation of ``a`` succeeds with positive pivots."""
    try:
        c = sla.cholesky(np.asarray(a, dtype=np.float64), lower=True, check_finite=True)
    except (sla.LinAlgError, ValueError):
        return False
    return bool(np.all(np.diag(c) > 0))


def invert_spd(a):
    """Inverse of a symmetric positive definite matrix through its Cholesky factor."""
    a = as_sym_matrix(a)
    try:
        factor = sla.cho_factor(a, lower=True)
    except sla.LinAlgError as exc:
        raise NumericalError("matrix is not positive definite; cannot invert") from exc
    inv = sla.cho_solve(factor, np.eye(a.shape[0]))
    return 0.5 * (inv + inv.T)
