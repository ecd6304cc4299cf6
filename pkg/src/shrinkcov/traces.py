"""Unbiased U-statistic estimators of tr(Sigma), tr(Sigma^2) and tr(D_Sigma^2).

Two routes compute the same statistics:

* :func:`traces_naive` sums the kernels literally over all tuples of mutually
  distinct observation indices. It is O(N^4) and only meant as an oracle.
* :func:`traces_fast` uses the N x N Gram matrix and per-variable power sums,
  costing O(N^2 p).

In uncentered mode the statistics are invariant to a common shift of the rows,
so both the Gram matrix and the power sums of the fast route are taken on
column-centred data. That is algebraically identical to working with the raw
rows and avoids the cancellation a large mean would cause.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from ._errors import DataError
from .linalg import as_data_matrix


def falling_factorial(s, t):
    """``s! / (s - t)!``, the number of ordered ``t``-tuples of distinct indices."""
    out = 1
    for k in range(t):
        out *= s - k
    return out


def min_obs(centered):
    return 2 if centered else 4


@dataclass(frozen=True)
class TraceStats:
    """Unbiased estimates of the three trace functionals of Sigma.

    ``t2`` and ``t3`` are U-statistics and may be negative in small samples;
    they are never clamped here.
    """

    t1: float
    t2: float
    t3: float
    df: int
    n_obs: int
    n_vars: int
    centered: bool

    def as_dict(self):
        return {
            "t1": self.t1,
            "t2": self.t2,
            "t3": self.t3,
            "df": self.df,
            "n_obs": self.n_obs,
            "n_vars": self.n_vars,
            "centered": self.centered,
        }


def _check_rows(x, centered):
    need = min_obs(centered)
    if x.shape[0] < need:
        mode = "centered" if centered else "uncentered"
        raise DataError(
            f"{mode} trace estimation requires at least {need} observations, "
            f"got {x.shape[0]}"
        )


def _lsum(a):
    return np.sum(a, dtype=np.longdouble)


def traces_fast(data, centered=False):
    """O(N^2 p) evaluation of the trace statistics.

    Parameters
    ----------
    data : array_like, shape (N, p)
    centered : bool
        True when the data are known to have mean zero; the statistics then
        reduce to the second-order U-statistics ``(U1, U2, U3)`` and the
        degrees of freedom are ``N`` instead of ``N - 1``.

    Returns
    -------
    TraceStats
    """
    x = as_data_matrix(data)
    _check_rows(x, centered)
    n, p = x.shape

    if centered:
        g = x @ x.T
        gd = np.diag(g)
        pairs = n * (n - 1)
        t1 = _lsum(gd) / n
        t2 = (_lsum(np.square(g)) - _lsum(np.square(gd))) / pairs
        sq = np.square(x)
        s2 = sq.sum(axis=0, dtype=np.longdouble)
        s4 = np.square(sq).sum(axis=0, dtype=np.longdouble)
        t3 = _lsum(np.square(s2) - s4) / pairs
        return TraceStats(float(t1), float(t2), float(t3), n, n, p, True)

    xc = x - x.mean(axis=0)
    g = xc @ xc.T
    gd = np.diag(g)
    tr_s = _lsum(gd) / (n - 1)
    tr_s2 = _lsum(np.square(g)) / (n - 1) ** 2
    q = _lsum(np.square(gd)) / (n - 1)
    t2 = (n - 1) / (n * (n - 2) * (n - 3)) * (
        (n - 1) * (n - 2) * tr_s2 + tr_s * tr_s - n * q
    )

    # Power sums of centred columns: s1 = 0, and s3 drops out with it.
    sq = np.square(xc)
    c2 = sq.sum(axis=0, dtype=np.longdouble)
    c4 = np.square(sq).sum(axis=0, dtype=np.longdouble)
    a2 = _lsum(np.square(c2))
    a4 = _lsum(c4)
    t3 = (
        (a2 - a4) / falling_factorial(n, 2)
        + 2 * (a2 - 2 * a4) / falling_factorial(n, 3)
        + 3 * (a2 - 2 * a4) / falling_factorial(n, 4)
    )
    return TraceStats(float(tr_s), float(t2), float(t3), n - 1, n, p, False)


def u_components(data):
    """Literal U-statistics ``U1 .. U8`` as a dict keyed ``"U1"`` to ``"U8"``.

    Every sum runs over ordered tuples of mutually distinct row indices and is
    divided by the number of such tuples.
    """
    x = as_data_matrix(data)
    n, p = x.shape
    if n < 4:
        raise DataError(f"the U-statistic oracle requires at least 4 observations, got {n}")
    gram = (x @ x.T).tolist()
    # hadamard[(i, j), (k, l)] = sum_a X_ia X_ja X_ka X_la
    outer = (x[:, None, :] * x[None, :, :]).reshape(n * n, p)
    had = (outer @ outer.T).tolist()

    def h(i, j, k, l):
        return had[i * n + j][k * n + l]

    idx = range(n)
    u1 = sum(gram[i][i] for i in idx) / n
    u2 = u3 = u4 = 0.0
    for i, j in permutations(idx, 2):
        u4 += gram[j][i]
        u2 += gram[i][j] ** 2
        u3 += h(i, i, j, j)
    u5 = u7 = 0.0
    for i, j, k in permutations(idx, 3):
        u5 += gram[i][j] * gram[i][k]
        u7 += h(i, i, j, k)
    u6 = u8 = 0.0
    for i, j, k, l in permutations(idx, 4):
        # tr(X_i X_j^T X_k X_l^T) = (X_j^T X_k)(X_l^T X_i)
        u6 += gram[j][k] * gram[l][i]
        u8 += h(i, j, k, l)

    p2, p3, p4 = (falling_factorial(n, t) for t in (2, 3, 4))
    return {
        "U1": u1,
        "U2": u2 / p2,
        "U3": u3 / p2,
        "U4": u4 / p2,
        "U5": u5 / p3,
        "U6": u6 / p4,
        "U7": u7 / p3,
        "U8": u8 / p4,
    }


def traces_naive(data, centered=False):
    """Brute-force trace statistics from the literal U-statistic definitions.

    Cost is O(N^4 p); intended for N of about 12 or less.
    """
    x = as_data_matrix(data)
    _check_rows(x, centered)
    n, p = x.shape
    if centered:
        # Only second-order terms are needed; avoid the 4-tuple loops.
        gram = (x @ x.T).tolist()
        sq = np.square(x)
        diag_had = (sq @ sq.T).tolist()
        u1 = sum(gram[i][i] for i in range(n)) / n
        u2 = u3 = 0.0
        for i, j in permutations(range(n), 2):
            u2 += gram[i][j] ** 2
            u3 += diag_had[i][j]
        pairs = falling_factorial(n, 2)
        return TraceStats(u1, u2 / pairs, u3 / pairs, n, n, p, True)
    u = u_components(x)
    return TraceStats(
        u["U1"] - u["U4"],
        u["U2"] - 2 * u["U5"] + u["U6"],
        u["U3"] - 2 * u["U7"] + u["U8"],
        n - 1,
        n,
        p,
        False,
    )


@dataclass
class OracleReport:
    """Monte Carlo check of E[t1], E[t2], E[t3] against exact traces."""

    mean: np.ndarray
    se: np.ndarray
    exact: np.ndarray
    reps: int
    flag_sigmas: float = 4.0

    @property
    def z(self):
        return (self.mean - self.exact) / self.se

    @property
    def flagged(self):
        """Names of statistics whose mean deviates by more than ``flag_sigmas`` SEs."""
        return [name for name, z in zip(("t1", "t2", "t3"), self.z) if abs(z) > self.flag_sigmas]

    def within(self, sigmas):
        return bool(np.all(np.abs(self.z) <= sigmas))


def unbiasedness_oracle(model, n_obs, reps, seed, scenario="normal", centered=False, shift=None):
    """Simulate the trace statistics under ``model`` and compare to exact traces.

    ``shift`` optionally adds a constant mean vector to every row, which the
    uncentered statistics must ignore.
    """
    from .models import exact_traces
    from .sampling import generate, replicate_rng

    if reps < 100:
        raise DataError("the unbiasedness oracle needs at least 100 replicates")
    sigma_root = model.sqrt()
    draws = np.empty((reps, 3))
    for b in range(reps):
        x = generate(sigma_root, scenario, n_obs, replicate_rng(seed, b))
        if shift is not None:
            x = x + np.asarray(shift, dtype=np.float64)
        ts = traces_fast(x, centered=centered)
        draws[b] = ts.t1, ts.t2, ts.t3
    tr1, tr2, trd, _ = exact_traces(model)
    return OracleReport(
        mean=draws.mean(axis=0),
        se=draws.std(axis=0, ddof=1) / np.sqrt(reps),
        exact=np.array([tr1, tr2, trd]),
        reps=reps,
    )
