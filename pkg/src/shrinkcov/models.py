"""Catalog of population covariance structures with exact trace formulas.

Each model knows how to materialise its dense matrix, its symmetric square
root and its inverse. Closed-form models also report exact traces without
materialising anything, so population intensities can be evaluated at any p.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import ortho_group

from ._errors import DataError
from .linalg import invert_spd, sym_sqrt
from .shrinkage import intensity

MAX_DENSE_DIM = 10_000

DEFAULT_BLOCK_RANGES = ((0.5, 5.0), (5.0, 10.0), (10.0, 20.0), (0.5, 100.0))


def _check_dim(p):
    if int(p) != p or p < 1:
        raise DataError(f"dimension must be a positive integer, got {p!r}")


def _guard(p):
    if p > MAX_DENSE_DIM:
        raise DataError(f"refusing to materialise a {p}x{p} matrix (limit {MAX_DENSE_DIM})")


class CovModel:
    """Common behaviour; subclasses fill in the structure."""

    p: int
    closed_form = True

    def materialize(self):
        raise NotImplementedError

    def exact_traces(self):
        """``(tr Sigma, tr Sigma^2, tr D_Sigma^2, tr (Sigma - I)^2)``."""
        s = self.materialize()
        t1 = float(np.trace(s))
        t2 = float(np.sum(np.square(s), dtype=np.longdouble))
        td = float(np.sum(np.square(np.diag(s)), dtype=np.longdouble))
        return t1, t2, td, t2 - 2 * t1 + self.p

    def sqrt(self):
        return sym_sqrt(self.materialize())

    def inverse(self):
        return invert_spd(self.materialize())

    def label(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(CovModel):
    p: int

    def __post_init__(self):
        _check_dim(self.p)

    def materialize(self):
        _guard(self.p)
        return np.eye(self.p)

    def exact_traces(self):
        p = float(self.p)
        return p, p, p, 0.0

    def sqrt(self):
        return self.materialize()

    def inverse(self):
        return self.materialize()

    def label(self):
        return "identity"


@dataclass(frozen=True)
class Tridiagonal(CovModel):
    """Unit diagonal, ``rho`` on the first off-diagonals."""

    p: int
    rho: float = 0.1

    def __post_init__(self):
        _check_dim(self.p)
        # 1 + 2 rho cos(k pi / (p + 1)) > 0 for every k needs |rho| <= 1/2
        if abs(self.rho) > 0.5:
            raise DataError(f"tridiagonal model needs |rho| <= 0.5 to stay PSD, got {self.rho}")

    def materialize(self):
        _guard(self.p)
        s = np.eye(self.p)
        k = np.arange(self.p - 1)
        s[k, k + 1] = s[k + 1, k] = self.rho
        return s

    def exact_traces(self):
        p = float(self.p)
        off = 2 * (p - 1) * self.rho**2
        return p, p + off, p, off

    def label(self):
        return f"tridiag:{self.rho!r}"


@dataclass(frozen=True)
class AR1(CovModel):
    """``Sigma_ab = rho^|a-b|``."""

    p: int
    rho: float

    def __post_init__(self):
        _check_dim(self.p)
        if not abs(self.rho) < 1:
            raise DataError(f"AR(1) model needs |rho| < 1, got {self.rho}")

    def materialize(self):
        _guard(self.p)
        lag = np.abs(np.subtract.outer(np.arange(self.p), np.arange(self.p)))
        return np.power(float(self.rho), lag)

    def exact_traces(self):
        p = self.p
        k = np.arange(1, p)
        off = 2.0 * float(np.sum((p - k) * np.power(float(self.rho), 2 * k), dtype=np.longdouble))
        return float(p), p + off, float(p), off

    def inverse(self):
        p, r = self.p, float(self.rho)
        _guard(p)
        inv = np.zeros((p, p))
        d = np.full(p, 1 + r * r)
        d[0] = d[-1] = 1.0
        if p == 1:
            d[0] = 1 - r * r
        inv[np.diag_indices(p)] = d
        k = np.arange(p - 1)
        inv[k, k + 1] = inv[k + 1, k] = -r
        return inv / (1 - r * r)

    def label(self):
        return f"ar1:{self.rho!r}"


@dataclass(frozen=True)
class CompoundSymmetry(CovModel):
    """Unit diagonal with a common correlation ``rho`` everywhere else."""

    p: int
    rho: float

    def __post_init__(self):
        _check_dim(self.p)
        lo = -1.0 / (self.p - 1) if self.p > 1 else -1.0
        if not (abs(self.rho) < 1 and self.rho > lo):
            raise DataError(
                f"compound symmetry needs {lo:.4g} < rho < 1 for p={self.p}, got {self.rho}"
            )

    def materialize(self):
        _guard(self.p)
        s = np.full((self.p, self.p), float(self.rho))
        np.fill_diagonal(s, 1.0)
        return s

    def exact_traces(self):
        p = float(self.p)
        off = p * (p - 1) * self.rho**2
        return p, p + off, p, off

    def sqrt(self):
        # eigenvalues 1 - rho (multiplicity p - 1) and 1 + (p - 1) rho along 1/sqrt(p)
        p, r = self.p, float(self.rho)
        _guard(p)
        a, b = np.sqrt(1 - r), np.sqrt(1 + (p - 1) * r)
        return a * np.eye(p) + (b - a) / p * np.ones((p, p))

    def inverse(self):
        p, r = self.p, float(self.rho)
        _guard(p)
        return (np.eye(p) - r / (1 + (p - 1) * r) * np.ones((p, p))) / (1 - r)

    def label(self):
        return f"cs:{self.rho!r}"


class _EigenModel(CovModel):
    """Sigma = Q diag(w) Q^T with sampled eigenvalues and Haar-random Q."""

    closed_form = False

    def spectrum(self):
        raise NotImplementedError

    @cached_property
    def _eig(self):
        return self.spectrum()

    def _compose(self, fn):
        w, blocks = self._eig
        out = np.zeros((self.p, self.p))
        start = 0
        for q in blocks:
            m = q.shape[0]
            ww = fn(w[start:start + m])
            out[start:start + m, start:start + m] = (q * ww) @ q.T
            start += m
        return 0.5 * (out + out.T)

    def materialize(self):
        _guard(self.p)
        return self._compose(lambda w: w)

    def sqrt(self):
        return self._compose(np.sqrt)

    def inverse(self):
        return self._compose(np.reciprocal)

    def eigenvalues(self):
        return np.sort(self._eig[0])


def _haar(m, rng):
    if m == 1:
        return np.ones((1, 1))
    return ortho_group.rvs(m, random_state=rng)


@dataclass(frozen=True, eq=True)
class RandomEigen(_EigenModel):
    p: int
    lo: float = 0.5
    hi: float = 10.0
    seed: int = 0

    def __post_init__(self):
        _check_dim(self.p)
        if not 0 < self.lo < self.hi:
            raise DataError(f"eigenvalue range needs 0 < lo < hi, got ({self.lo}, {self.hi})")

    def spectrum(self):
        _guard(self.p)
        rng = np.random.default_rng(self.seed)
        w = rng.uniform(self.lo, self.hi, self.p)
        return w, [_haar(self.p, rng)]

    def label(self):
        return f"rand-eigen:{self.lo!r},{self.hi!r}"


@dataclass(frozen=True, eq=True)
class BlockDiagonal(_EigenModel):
    """Four equal diagonal blocks, each with its own eigenvalue range."""

    p: int
    ranges: tuple = field(default=DEFAULT_BLOCK_RANGES)
    seed: int = 0

    def __post_init__(self):
        _check_dim(self.p)
        if self.p % 4:
            raise DataError(f"block-diagonal model needs p divisible by 4, got {self.p}")
        if len(self.ranges) != 4:
            raise DataError("block-diagonal model needs exactly four eigenvalue ranges")
        for lo, hi in self.ranges:
            if not 0 < lo < hi:
                raise DataError(f"eigenvalue range needs 0 < lo < hi, got ({lo}, {hi})")
        object.__setattr__(self, "ranges", tuple(tuple(map(float, r)) for r in self.ranges))

    def spectrum(self):
        _guard(self.p)
        rng = np.random.default_rng(self.seed)
        m = self.p // 4
        ws, qs = [], []
        for lo, hi in self.ranges:
            ws.append(rng.uniform(lo, hi, m))
            qs.append(_haar(m, rng))
        return np.concatenate(ws), qs

    def label(self):
        return "block:" + ";".join(f"{lo!r},{hi!r}" for lo, hi in self.ranges)


def exact_traces(model):
    return model.exact_traces()


def trace_ratio(model):
    """Finite-p diagnostic ``tr(Sigma^2) / tr(Sigma)^2``."""
    t1, t2, _, _ = model.exact_traces()
    return t2 / (t1 * t1)


def true_lambda(model, n_obs, centered=True, target="spherical"):
    """Population optimal intensity (fourth-moment term dropped) for ``model``."""
    if n_obs < 1:
        raise DataError(f"n_obs must be positive, got {n_obs}")
    t1, t2, td, _ = model.exact_traces()
    n = n_obs if centered else n_obs - 1
    return intensity(target, t1, t2, td, model.p, n)


def materialize(model):
    return model.materialize()


def _floats(text, count, what):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise DataError(f"could not parse numbers in {what} {text!r}") from None
    if len(vals) != count:
        raise DataError(f"{what} expects {count} comma-separated values, got {text!r}")
    return vals


def parse_model(text, p, seed=0):
    """Build a model from the CLI grammar.

    ``identity``, ``tridiag[:RHO]``, ``ar1:RHO``, ``cs:RHO``,
    ``rand-eigen:LO,HI`` or ``block:LO1,HI1;LO2,HI2;LO3,HI3;LO4,HI4``.
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name == "identity":
        return Identity(p)
    if name == "tridiag":
        return Tridiagonal(p, _floats(arg, 1, "tridiag")[0]) if arg else Tridiagonal(p)
    if name == "ar1":
        return AR1(p, _floats(arg, 1, "ar1")[0])
    if name == "cs":
        return CompoundSymmetry(p, _floats(arg, 1, "cs")[0])
    if name == "rand-eigen":
        lo, hi = _floats(arg, 2, "rand-eigen") if arg else (0.5, 10.0)
        return RandomEigen(p, lo, hi, seed)
    if name == "block":
        if not arg:
            return BlockDiagonal(p, seed=seed)
        parts = arg.split(";")
        if len(parts) != 4:
            raise DataError(f"block model expects four LO,HI pairs, got {arg!r}")
        return BlockDiagonal(p, tuple(tuple(_floats(s, 2, "block")) for s in parts), seed)
    raise DataError(f"unknown covariance model {text!r}")
