"""Shrinkage intensities, shrunk covariance estimates and target selection.

All three intensity formulas are written for a generic degrees-of-freedom
``n``: ``n = N - 1`` when the mean is estimated and ``n = N`` when the data
are known to be centred. Ratios are clamped to ``[0, 1]``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._errors import DataError, NumericalError
from .linalg import as_data_matrix, sample_covariance
from .traces import TraceStats, min_obs, traces_fast


class TargetKind(str, Enum):
    SPHERICAL = "spherical"  # nu * I, nu estimated by tr(S) / p
    IDENTITY = "identity"  # I
    DIAGONAL = "diagonal"  # diag(S)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise DataError(f"unknown target {value!r}; expected one of {names}") from None


def _clamp(num, den):
    if not den > 0:
        raise NumericalError(f"degenerate shrinkage denominator ({den!r})")
    return min(max(num / den, 0.0), 1.0)


def spherical_intensity(t1, t2, p, n):
    num = t2 + t1 * t1
    den = (n + 1) * t2 + (p - n) / p * t1 * t1
    return _clamp(num, den)


def identity_intensity(t1, t2, p, n):
    num = t2 + t1 * t1
    den = (n + 1) * t2 + t1 * t1 - n * (2 * t1 - p)
    return _clamp(num, den)


def diagonal_intensity(t1, t2, t3, p, n):
    num = t2 + t1 * t1 - 2 * t3
    den = (n + 1) * t2 + t1 * t1 - (n + 2) * t3
    return _clamp(num, den)


def intensity(target, t1, t2, t3, p, n):
    """Clamped optimal intensity for ``target`` from trace values and df ``n``.

    Works equally for estimated traces and for exact population traces.
    """
    target = TargetKind.parse(target)
    if target is TargetKind.SPHERICAL:
        return spherical_intensity(t1, t2, p, n)
    if target is TargetKind.IDENTITY:
        return identity_intensity(t1, t2, p, n)
    return diagonal_intensity(t1, t2, t3, p, n)


def _from_stats(target, stats):
    if not stats.t1 > 0:
        raise NumericalError(
            "degenerate shrinkage denominator: the data have zero total sample variance"
        )
    return intensity(target, stats.t1, stats.t2, stats.t3, stats.n_vars, stats.df)


def lambda_spherical(stats: TraceStats) -> float:
    """Estimated intensity towards ``nu * I``."""
    return _from_stats(TargetKind.SPHERICAL, stats)


def lambda_identity(stats: TraceStats) -> float:
    """Estimated intensity towards the identity matrix."""
    return _from_stats(TargetKind.IDENTITY, stats)


def lambda_diagonal(stats: TraceStats) -> float:
    """Estimated intensity towards the diagonal of the sample covariance."""
    return _from_stats(TargetKind.DIAGONAL, stats)


def nu_hat(stats: TraceStats) -> float:
    return stats.t1 / stats.n_vars


@dataclass
class ShrinkageEstimate:
    target: TargetKind
    lambda_hat: float
    nu_hat: float | None
    sample_cov: np.ndarray
    shrunk: np.ndarray
    traces: TraceStats

    def target_matrix(self):
        return target_matrix(self.target, self.sample_cov, self.nu_hat)


def target_matrix(target, sample_cov, nu=None):
    target = TargetKind.parse(target)
    p = sample_cov.shape[0]
    if target is TargetKind.SPHERICAL:
        return nu * np.eye(p)
    if target is TargetKind.IDENTITY:
        return np.eye(p)
    return np.diag(np.diag(sample_cov))


def estimate(data, target=TargetKind.SPHERICAL, centered=False, stats=None):
    """Shrink the sample covariance of ``data`` towards ``target``.

    Parameters
    ----------
    data : array_like, shape (N, p)
    target : TargetKind or str
    centered : bool
        Use the known-zero-mean variant (divisor ``N``, df ``N``).
    stats : TraceStats, optional
        Precomputed trace statistics for ``data``.

    Returns
    -------
    ShrinkageEstimate
    """
    x = as_data_matrix(data)
    target = TargetKind.parse(target)
    need = min_obs(centered)
    if x.shape[0] < need:
        raise DataError(
            f"shrinkage estimation requires at least {need} observations, got {x.shape[0]}"
        )
    if stats is None:
        stats = traces_fast(x, centered=centered)
    lam = _from_stats(target, stats)
    s = sample_covariance(x, centered=centered)
    nu = nu_hat(stats) if target is TargetKind.SPHERICAL else None
    t = target_matrix(target, s, nu)
    shrunk = (1.0 - lam) * s + lam * t
    return ShrinkageEstimate(target, lam, nu, s, shrunk, stats)


def _lw_parts(x):
    n, p = x.shape
    g = x @ x.T
    g2 = np.sum(np.square(g), dtype=np.longdouble)
    tr_s0 = np.trace(g) / n
    # d^2 = ||S0 - m I||^2 / p  and  bbar^2 = N^-2 sum_i ||x_i x_i^T - S0||^2 / p
    d2 = float((g2 / n**2 - tr_s0**2 / p) / p)
    b2bar = float((np.sum(np.square(np.diag(g)), dtype=np.longdouble) - g2 / n) / (n**2 * p))
    return d2, b2bar, tr_s0 / p


def lambda_lw(data):
    """Ledoit-Wolf (2004) shrinkage weight on ``m * I`` for zero-mean data.

    Raises :class:`NumericalError` when the sample covariance is already
    spherical (zero dispersion).
    """
    x = as_data_matrix(data)
    if x.shape[0] < 2:
        raise DataError("Ledoit-Wolf intensity requires at least 2 observations")
    d2, b2bar, _ = _lw_parts(x)
    if not d2 > 0:
        raise NumericalError("degenerate Ledoit-Wolf baseline: sample covariance is spherical")
    return min(max(b2bar, 0.0), d2) / d2


def lw_estimate(data):
    """Ledoit-Wolf estimate ``(lambda, shrunk)`` with ``lambda = 1`` when degenerate."""
    x = as_data_matrix(data)
    try:
        lam = lambda_lw(x)
    except NumericalError:
        lam = 1.0
    s0 = sample_covariance(x, centered=True)
    m = np.trace(s0) / s0.shape[0]
    return lam, (1.0 - lam) * s0 + lam * m * np.eye(s0.shape[0])


def advise_target(lam_sph, lam_id, lam_diag, nu, var_range, gap=0.05, nu_tol=0.1,
                  range_threshold=1.0):
    """Rule of thumb for picking among the three targets.

    Returns ``(TargetKind, rationale)``. A clear winner by intensity is chosen
    outright; otherwise the identity is preferred when ``nu`` is near one, the
    sample diagonal when the variances spread by more than ``range_threshold``,
    and the scaled identity in all remaining cases.
    """
    lams = {
        TargetKind.SPHERICAL: lam_sph,
        TargetKind.IDENTITY: lam_id,
        TargetKind.DIAGONAL: lam_diag,
    }
    spread = max(lams.values()) - min(lams.values())
    if spread > gap:
        best = max(lams, key=lams.get)  # ties resolve in declaration order
        return best, (
            f"intensities differ by {spread:.4f} > {gap}; "
            f"{best.value} has the largest intensity {lams[best]:.4f}"
        )
    if abs(nu - 1.0) <= nu_tol:
        return TargetKind.IDENTITY, (
            f"intensities are similar and nu_hat={nu:.4f} is within {nu_tol} of 1"
        )
    if var_range > range_threshold:
        return TargetKind.DIAGONAL, (
            f"intensities are similar and the variance range {var_range:.4f} "
            f"exceeds {range_threshold}"
        )
    return TargetKind.SPHERICAL, (
        f"intensities are similar, nu_hat={nu:.4f} is far from 1 and the "
        f"variance range {var_range:.4f} is small"
    )
