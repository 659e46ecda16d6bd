"""Parametric Monte Carlo sampling distribution and percentile intervals.

Each replication simulates a fresh path from the fitted parameters and
refits; the empirical quantiles of the refitted parameters give the
confidence bounds. Per-replication seeds are spawned from the master seed
(numpy SeedSequence), so any replication is reproducible in isolation and
the result is independent of worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientReplications, SpotvarError, TooManyFailures
from .ou import OUParams, mle_fit, simulate_path


@dataclass(frozen=True)
class McConfig:
    replications: int = 1000
    path_length: int = 2_000_000
    dt: float = 1.0
    confidence: float = 0.90
    master_seed: int = 0
    initial_value: float | None = None  # None -> start at the fitted mean

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError("replications must be >= 2")
        if self.path_length < 3:
            raise ValueError("path_length must be >= 3")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class McSamples:
    """Per-parameter estimate vectors across replications (failures excluded)."""

    alpha: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    n_requested: int
    n_failed: int
    master_seed: int


@dataclass(frozen=True)
class CIReport:
    """Percentile-method bounds per parameter. Bounds need not bracket the
    point estimate, but lower <= upper always holds."""

    point: dict
    lower: dict
    upper: dict
    confidence: float
    replications: int
    n_failed: int
    master_seed: int

    def as_dict(self):
        return {
            "confidence": self.confidence,
            "replications": self.replications,
            "failures": self.n_failed,
            "master_seed": self.master_seed,
            "parameters": {
                name: {
                    "point": self.point[name],
                    "lower": self.lower[name],
                    "upper": self.upper[name],
                }
                for name in ("alpha", "mu", "sigma")
            },
        }


def _one_replication(args):
    fitted, cfg, seed = args
    v0 = cfg.initial_value if cfg.initial_value is not None else fitted.mu
    path = simulate_path(fitted, v0, cfg.path_length, cfg.dt, rng_seed=seed)
    try:
        params, _, _ = mle_fit(path, cfg.dt)
    except SpotvarError:
        return None
    return params.alpha, params.mu, params.sigma


def sampling_distribution(fitted: OUParams, cfg: McConfig, workers=1) -> McSamples:
    """Simulate-and-refit replications; errors are excluded and counted.

    Raises TooManyFailures if more than 1% of replications error out.
    """
    fitted.validate()
    seeds = np.random.SeedSequence(cfg.master_seed).spawn(cfg.replications)
    jobs = [(fitted, cfg, s) for s in seeds]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_replication, jobs, chunksize=8))
    else:
        results = [_one_replication(j) for j in jobs]

    ok = [r for r in results if r is not None]
    n_failed = cfg.replications - len(ok)
    if n_failed > 0.01 * cfg.replications:
        raise TooManyFailures(
            f"{n_failed}/{cfg.replications} replications failed to fit"
        )
    arr = np.array(ok)
    return McSamples(
        alpha=arr[:, 0],
        mu=arr[:, 1],
        sigma=arr[:, 2],
        n_requested=cfg.replications,
        n_failed=n_failed,
        master_seed=cfg.master_seed,
    )


def confidence_intervals(samples: McSamples, confidence, point: OUParams) -> CIReport:
    """Empirical quantiles at (1-c)/2 and (1+c)/2 per parameter
    (linear-interpolation quantiles, same method as the summary tables)."""
    vectors = {"alpha": samples.alpha, "mu": samples.mu, "sigma": samples.sigma}
    for name, vec in vectors.items():
        if len(vec) < 2:
            raise InsufficientReplications(f"{name}: need >= 2 estimates")
    lo_q = 100 * (1 - confidence) / 2
    hi_q = 100 * (1 + confidence) / 2
    lower, upper = {}, {}
    for name, vec in vectors.items():
        lower[name] = float(np.percentile(vec, lo_q, method="linear"))
        upper[name] = float(np.percentile(vec, hi_q, method="linear"))
    return CIReport(
        point={"alpha": point.alpha, "mu": point.mu, "sigma": point.sigma},
        lower=lower,
        upper=upper,
        confidence=confidence,
        replications=samples.n_requested,
        n_failed=samples.n_failed,
        master_seed=samples.master_seed,
    )
