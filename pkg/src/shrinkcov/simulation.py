"""Monte Carlo comparison of shrinkage estimators against the Ledoit-Wolf baseline.

Each replicate draws its own data from an independent RNG stream keyed by
``(seed, replicate)``. Replicates may run on a thread pool; results are
collected in replicate order, so a fixed seed gives identical output for any
number of workers.
"""

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._errors import DataError, NumericalError, ShrinkCovError
from .linalg import invert_spd, sample_covariance, scaled_frobenius_sq
from .models import CovModel, Identity
from .sampling import ScenarioKind, generate, replicate_rng
from .shrinkage import TargetKind, estimate, lw_estimate
from .traces import min_obs, traces_fast

ESTIMATORS = ("spherical", "identity", "diagonal", "lw", "sample")
BASELINE = "lw"

CSV_FIELDS = (
    "scenario", "model", "N", "p", "estimator", "mean_loss", "spiral_pct",
    "lambda_mean", "lambda_sd", "reps", "seed",
)
DUMP_FIELDS = ("replicate", "estimator", "loss", "lambda")


class SimulationError(NumericalError):
    """An estimator failed inside a replicate; carries the replicate index."""

    def __init__(self, replicate, estimator, cause):
        super().__init__(f"replicate {replicate}: estimator {estimator!r} failed: {cause}")
        self.replicate = replicate
        self.estimator = estimator


def worker_count(requested=None):
    """Number of worker threads: explicit value, else ``SHRINKCOV_THREADS``, else 1."""
    if requested is None:
        env = os.environ.get("SHRINKCOV_THREADS", "").strip()
        requested = int(env) if env else 1
    return max(1, int(requested))


def _normalize_estimators(names):
    names = [str(n).lower() for n in names]
    if not names:
        raise DataError("at least one estimator must be requested")
    unknown = sorted(set(names) - set(ESTIMATORS))
    if unknown:
        raise DataError(f"unknown estimators {unknown}; choose from {list(ESTIMATORS)}")
    return tuple(e for e in ESTIMATORS if e in names)


@dataclass
class SimConfig:
    scenario: ScenarioKind
    model: CovModel
    n_obs: int
    reps: int = 1000
    seed: int = 0
    centered: bool = True
    evaluate_inverse: bool = False
    estimators: tuple = ("spherical", "lw")

    def __post_init__(self):
        self.scenario = ScenarioKind.parse(self.scenario)
        self.estimators = _normalize_estimators(self.estimators)
        if self.reps < 1:
            raise DataError("reps must be at least 1")
        need = min_obs(self.centered)
        if self.n_obs < need:
            mode = "centered" if self.centered else "uncentered"
            raise DataError(f"{mode} simulation requires at least {need} observations")

    @property
    def p(self):
        return self.model.p


@dataclass
class EstimatorSummary:
    mean_loss: float
    spiral_pct: float
    lambda_mean: float
    lambda_sd: float


@dataclass
class SpiralReport:
    config: SimConfig
    summary: dict
    losses: dict = field(repr=False)
    lambdas: dict = field(repr=False)

    def rows(self):
        c = self.config
        for name, s in self.summary.items():
            yield {
                "scenario": c.scenario.value,
                "model": c.model.label(),
                "N": c.n_obs,
                "p": c.p,
                "estimator": name,
                "mean_loss": s.mean_loss,
                "spiral_pct": s.spiral_pct,
                "lambda_mean": s.lambda_mean,
                "lambda_sd": s.lambda_sd,
                "reps": c.reps,
                "seed": c.seed,
            }

    def dump_rows(self):
        for b in range(self.config.reps):
            for name in self.summary:
                yield {
                    "replicate": b,
                    "estimator": name,
                    "loss": self.losses[name][b],
                    "lambda": self.lambdas[name][b],
                }


def spiral(baseline_losses, candidate_losses):
    """Percentage relative improvement in total loss over the baseline."""
    if len(baseline_losses) != len(candidate_losses) or len(baseline_losses) < 1:
        raise DataError("loss lists must be non-empty and of equal length")
    base = math.fsum(baseline_losses)
    if not base > 0:
        raise NumericalError("baseline losses sum to zero; SPRIAL undefined")
    return (base - math.fsum(candidate_losses)) / base * 100.0


class _Replicator:
    def __init__(self, config):
        self.config = config
        model = config.model
        self.p = model.p
        self.root = None if isinstance(model, Identity) else model.sqrt()
        self.truth = model.inverse() if config.evaluate_inverse else model.materialize()
        names = list(config.estimators)
        if BASELINE not in names:
            names.append(BASELINE)
        self.names = names

    def _loss(self, name, b, matrix):
        if self.config.evaluate_inverse:
            try:
                matrix = invert_spd(matrix)
            except ShrinkCovError as exc:
                raise SimulationError(b, name, exc) from exc
        return scaled_frobenius_sq(matrix - self.truth)

    def __call__(self, b):
        c = self.config
        x = generate(self.root, c.scenario, c.n_obs, replicate_rng(c.seed, b), p=self.p)
        out = {}
        stats = None
        for name in self.names:
            try:
                if name == "lw":
                    lam, mat = lw_estimate(x)
                elif name == "sample":
                    lam, mat = math.nan, sample_covariance(x, centered=c.centered)
                else:
                    if stats is None:
                        stats = traces_fast(x, centered=c.centered)
                    est = estimate(x, TargetKind(name), centered=c.centered, stats=stats)
                    lam, mat = est.lambda_hat, est.shrunk
            except ShrinkCovError as exc:
                raise SimulationError(b, name, exc) from exc
            out[name] = (self._loss(name, b, mat), lam)
        return out


def run_sim(config, workers=None):
    """Run ``config.reps`` replicates and summarise losses, SPRIAL and intensities."""
    job = _Replicator(config)
    n_workers = worker_count(workers)
    if n_workers == 1:
        results = [job(b) for b in range(config.reps)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(job, range(config.reps)))

    losses = {n: np.array([r[n][0] for r in results]) for n in job.names}
    lambdas = {n: np.array([r[n][1] for r in results]) for n in job.names}
    baseline = losses[BASELINE]
    summary = {}
    for name in config.estimators:
        lam = lambdas[name]
        ddof = 1 if config.reps > 1 else 0
        summary[name] = EstimatorSummary(
            mean_loss=math.fsum(losses[name]) / config.reps,
            spiral_pct=spiral(baseline, losses[name]),
            lambda_mean=math.fsum(lam) / config.reps,
            lambda_sd=float(np.std(lam, ddof=ddof)),
        )
    return SpiralReport(config, summary, losses, lambdas)


def sweep(configs, workers=None):
    """Run every configuration in order; returns the list of reports."""
    configs = list(configs)
    if not configs:
        raise DataError("sweep needs at least one configuration")
    return [run_sim(c, workers=workers) for c in configs]


def _fmt(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def write_csv(reports, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rep in reports:
        for row in rep.rows():
            w.writerow([_fmt(row[k]) for k in CSV_FIELDS])


def write_dump(reports, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(DUMP_FIELDS)
    for rep in reports:
        for row in rep.dump_rows():
            w.writerow([_fmt(row[k]) for k in DUMP_FIELDS])
