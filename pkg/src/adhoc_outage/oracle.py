"""Fading-level Monte Carlo estimate of the conditional outage probability.

Independent of the closed form: it draws the gamma power gains and Bernoulli
activity indicators explicitly and counts how often the SINR falls to the
threshold. Trials are split into fixed-size chunks, each with its own stream
derived from (seed, chunk index), so the estimate does not depend on how the
chunks are distributed over workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincinv

from .errors import DomainError

CHUNK_TRIALS = 1 << 16


@dataclass(frozen=True)
class OracleConfig:
    trials: int = 1_000_000
    seed: int = 0
    antithetic: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("oracle needs at least one trial")
        if self.antithetic and self.trials % 2:
            raise DomainError("antithetic sampling needs an even number of trials")


@dataclass(frozen=True)
class OracleEstimate:
    estimate: float
    std_error: float
    trials: int

    def __iter__(self):
        return iter((self.estimate, self.std_error))


def draw_fading(m, size, rng):
    """Unit-mean gamma power gains with shape ``m`` (Nakagami-m amplitude squared)."""
    m = np.asarray(m, dtype=float)
    return rng.gamma(m, 1.0 / m, size=size)


def _chunk_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _sinr_outages(g0, g, active, noise, omega0, omega_i, beta):
    interference = np.sum(np.where(active, g * omega_i, 0.0), axis=1)
    with np.errstate(divide="ignore"):
        # no noise and no active interferer: infinite SINR, never an outage
        sinr = g0 * omega0 / (noise + interference)
    return sinr <= beta


def _run_chunk(args):
    index, n, seed, antithetic, noise, omega0, omega_i, m0, m, p, beta = args
    rng = _chunk_rng(seed, index)
    M = omega_i.size
    if not antithetic:
        g0 = draw_fading(m0, n, rng)
        g = draw_fading(m, (n, M), rng)
        active = rng.random((n, M)) < p
        return int(_sinr_outages(g0, g, active, noise, omega0, omega_i, beta).sum()), None
    half = n // 2
    u0 = rng.random(half)
    u = rng.random((half, M))
    v = rng.random((half, M))
    hits = []
    for a0, a, b in ((u0, u, v), (1.0 - u0, 1.0 - u, 1.0 - v)):
        g0 = gammaincinv(m0, a0) / m0
        g = gammaincinv(m, a) / m
        hits.append(_sinr_outages(g0, g, b < p, noise, omega0, omega_i, beta))
    pair_means = 0.5 * (hits[0].astype(float) + hits[1])
    return int(hits[0].sum() + hits[1].sum()), (float(pair_means.sum()), float((pair_means ** 2).sum()))


def simulate_outage(gamma_snr, omega, ch, cfg=OracleConfig()):
    """Monte Carlo outage estimate and its standard error for fixed Omega.

    ``m0`` need not be an integer here. ``gamma_snr`` is linear; ``inf``
    removes the noise term.
    """
    if not gamma_snr > 0:
        raise DomainError("SNR must be positive")
    omega_i = np.asarray(omega.interference, dtype=float)
    if omega_i.size != ch.num_interferers:
        raise DomainError("omega and channel parameters disagree on M")
    noise = 0.0 if np.isinf(gamma_snr) else 1.0 / gamma_snr
    sizes = [CHUNK_TRIALS] * (cfg.trials // CHUNK_TRIALS)
    if cfg.trials % CHUNK_TRIALS:
        sizes.append(cfg.trials % CHUNK_TRIALS)
    if cfg.antithetic and any(n % 2 for n in sizes):
        raise DomainError("antithetic sampling needs even chunk sizes")
    tasks = [
        (i, n, cfg.seed, cfg.antithetic, noise, omega.reference, omega_i,
         float(ch.m0), ch.m, ch.p, ch.sinr_threshold)
        for i, n in enumerate(sizes)
    ]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_run_chunk, tasks))
        # map() preserves task order, so the reduction below is worker-independent
    else:
        results = [_run_chunk(t) for t in tasks]

    hits = sum(r[0] for r in results)
    eps = hits / cfg.trials
    if not cfg.antithetic:
        se = np.sqrt(eps * (1.0 - eps) / cfg.trials)
    else:
        pairs = cfg.trials // 2
        s1 = sum(r[1][0] for r in results)
        s2 = sum(r[1][1] for r in results)
        var = max(s2 / pairs - (s1 / pairs) ** 2, 0.0) * pairs / max(pairs - 1, 1)
        se = np.sqrt(var / pairs)
    return OracleEstimate(float(eps), float(se), cfg.trials)


def binomial_std_error(eps, trials):
    return float(np.sqrt(eps * (1.0 - eps) / trials))
