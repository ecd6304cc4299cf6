"""Nonparametric Stein-type shrinkage covariance estimation for N << p.

The estimators shrink the sample covariance towards one of three targets
(scaled identity, identity, sample diagonal) with intensities built from
unbiased U-statistic estimates of tr(Sigma), tr(Sigma^2) and tr(D_Sigma^2).
"""

from ._errors import DataError, NumericalError, ShrinkCovError
from .linalg import (
    chol_pd_check,
    invert_spd,
    sample_covariance,
    scaled_frobenius_sq,
    sym_sqrt,
)
from .models import (
    AR1,
    BlockDiagonal,
    CompoundSymmetry,
    Identity,
    RandomEigen,
    Tridiagonal,
    exact_traces,
    parse_model,
    true_lambda,
)
from .sampling import ScenarioKind, generate, replicate_rng
from .shrinkage import (
    ShrinkageEstimate,
    TargetKind,
    advise_target,
    estimate,
    lambda_diagonal,
    lambda_identity,
    lambda_lw,
    lambda_spherical,
    nu_hat,
)
from .simulation import SimConfig, SpiralReport, run_sim, spiral, sweep
from .traces import TraceStats, traces_fast, traces_naive, unbiasedness_oracle

__version__ = "0.1.0"

__all__ = [
    "AR1", "BlockDiagonal", "CompoundSymmetry", "DataError", "Identity", "NumericalError",
    "RandomEigen", "ScenarioKind", "ShrinkCovError", "ShrinkageEstimate", "SimConfig",
    "SpiralReport", "TargetKind", "TraceStats", "Tridiagonal", "advise_target",
    "chol_pd_check", "estimate", "exact_traces", "generate", "invert_spd", "lambda_diagonal",
    "lambda_identity", "lambda_lw", "lambda_spherical", "nu_hat", "parse_model",
    "replicate_rng", "run_sim", "sample_covariance", "scaled_frobenius_sq", "spiral",
    "sweep", "sym_sqrt", "traces_fast", "traces_naive", "true_lambda", "unbiasedness_oracle",
]
