"""Data generation for the three noise scenarios and per-replicate RNG streams."""

from enum import Enum

import numpy as np

from ._errors import DataError

GAMMA_SHAPE = 4.0
GAMMA_SCALE = 2.0  # rate 0.5; mean 8, sd 4


class ScenarioKind(str, Enum):
    NORMAL = "normal"
    GAMMA = "gamma"  # (G - 8) / 4 with G ~ Gamma(shape 4, rate 0.5)
    MIXTURE = "mixture"  # first p // 2 coordinates normal, the rest gamma

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"1": cls.NORMAL, "2": cls.GAMMA, "3": cls.MIXTURE, "gammastd": cls.GAMMA}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DataError(
                f"unknown scenario {value!r}; expected normal, gamma or mixture"
            ) from None


def replicate_rng(seed, replicate, purpose=0):
    """Independent generator for one ``(replicate, purpose)`` pair under ``seed``.

    Streams are derived from the seed and the indices alone, so results do not
    depend on the order or the thread in which replicates are run.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replicate), int(purpose)))
    return np.random.default_rng(ss)


def standardized_gamma(rng, size):
    return (rng.gamma(GAMMA_SHAPE, GAMMA_SCALE, size) - GAMMA_SHAPE * GAMMA_SCALE) / (
        np.sqrt(GAMMA_SHAPE) * GAMMA_SCALE
    )


def draw_noise(scenario, n_obs, p, rng):
    """``(n_obs, p)`` matrix of standardized white noise Z."""
    scenario = ScenarioKind.parse(scenario)
    if scenario is ScenarioKind.NORMAL:
        return rng.standard_normal((n_obs, p))
    if scenario is ScenarioKind.GAMMA:
        return standardized_gamma(rng, (n_obs, p))
    half = p // 2
    z = np.empty((n_obs, p))
    z[:, :half] = rng.standard_normal((n_obs, half))
    z[:, half:] = standardized_gamma(rng, (n_obs, p - half))
    return z


def generate(sigma_root, scenario, n_obs, rng, p=None):
    """Rows ``X_i = Sigma^{1/2} Z_i`` (mean zero).

    ``sigma_root`` is a symmetric square root of Sigma, a covariance model (its
    root is computed here), or ``None`` for the identity, in which case ``p``
    must be given.
    """
    if sigma_root is not None and not isinstance(sigma_root, np.ndarray):
        sigma_root = sigma_root.sqrt()
    if sigma_root is None:
        if p is None:
            raise DataError("p is required when no square root is given")
    else:
        p = sigma_root.shape[0]
    z = draw_noise(scenario, n_obs, p, rng)
    return z if sigma_root is None else z @ sigma_root
