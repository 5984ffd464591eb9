"""Monte Carlo averaging of the exact conditional outage over placement and shadowing.

Fading is never simulated here: each realization contributes its exact
conditional ccdf. Realization ``k`` draws its interferer positions and its
shadowing from two streams spawned from ``SeedSequence(master_seed,
spawn_key=(k,))``, so results do not depend on how realizations are split
across workers, and the first j interferers (and the first j+1 shadowing
factors) of a realization are the same for every M >= j.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SaturationError
from .model import draw_shadowing, omega_from_distances
from .outage import ccdf_conditional_batch
from .placement import place

RETAIN_LIMIT = 1_000_000


@dataclass(frozen=True)
class GeometrySamples:
    """Interferer distances (N, M) and shadowing in dB (N, M+1) for N networks."""

    distances: np.ndarray
    shadowing_db: np.ndarray
    tx_distance: float
    master_seed: int

    @property
    def num_realizations(self):
        return self.distances.shape[0]

    def truncate(self, num_interferers):
        """Samples restricted to the first ``num_interferers`` interferers."""
        return GeometrySamples(
            self.distances[:, :num_interferers],
            self.shadowing_db[:, : num_interferers + 1],
            self.tx_distance, self.master_seed,
        )

    def omegas(self, ch):
        """Normalized powers (omega0 (N,), omega_i (N, M)) under channel ``ch``."""
        return omega_from_distances(self.tx_distance, self.distances, ch, self.shadowing_db)


@dataclass(frozen=True)
class SpatialAverageResult:
    grid: np.ndarray
    avg_ccdf: np.ndarray
    avg_outage: np.ndarray
    num_realizations: int
    master_seed: int
    per_realization_outage: np.ndarray = None

    def std_error(self):
        """Naive standard error of each average across realizations."""
        if self.per_realization_outage is None:
            return None
        n = self.num_realizations
        return self.per_realization_outage.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(self.grid)


@dataclass(frozen=True)
class NetworkOutageCdf:
    thresholds: np.ndarray
    cdf_values: np.ndarray


@dataclass(frozen=True)
class OutageCurve:
    """A grid (Gamma, M or eps_T) paired with outage values."""

    axis: str
    grid: np.ndarray
    values: np.ndarray
    provenance: str
    label: str = ""


def realization_streams(master_seed, index):
    """(placement, shadowing) generators for realization ``index``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(int(index),))
    place_ss, shadow_ss = ss.spawn(2)
    return np.random.default_rng(place_ss), np.random.default_rng(shadow_ss)


def _sample_block(args):
    geom, tx_distance, sigma_db, master_seed, start, stop = args
    M = geom.num_interferers
    dist = np.empty((stop - start, M))
    shadow = np.zeros((stop - start, M + 1))
    tx = (tx_distance, 0.0)
    for row, k in enumerate(range(start, stop)):
        place_rng, shadow_rng = realization_streams(master_seed, k)
        try:
            net = place(geom, tx, place_rng)
        except SaturationError as exc:
            exc.realization = k
            exc.args = (f"realization {k}: {exc.args[0]}",)
            raise
        dist[row] = net.interferer_distances
        shadow[row] = draw_shadowing(sigma_db, M + 1, shadow_rng)
    return dist, shadow


def sample_geometry(geom, tx_distance, sigma_db, num_realizations, master_seed, workers=1,
                    block=1000):
    """Draw N placements plus shadowing; the result is independent of ``workers``."""
    if num_realizations < 1:
        raise DomainError("need at least one realization")
    bounds = list(range(0, num_realizations, block)) + [num_realizations]
    tasks = [(geom, tx_distance, sigma_db, master_seed, a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_sample_block, tasks))
    else:
        parts = [_sample_block(t) for t in tasks]
    dist = np.concatenate([p[0] for p in parts])
    shadow = np.concatenate([p[1] for p in parts])
    return GeometrySamples(dist, shadow, float(tx_distance), int(master_seed))


def conditional_outages(samples, ch, gamma_grid):
    """Per-realization exact outage, shape (N, K), for linear SNRs ``gamma_grid``."""
    gamma_grid = np.atleast_1d(np.asarray(gamma_grid, dtype=float))
    if np.any(gamma_grid <= 0):
        raise DomainError("SNR grid must be positive")
    with np.errstate(divide="ignore"):
        z = 1.0 / gamma_grid
    omega0, omega_i = samples.omegas(ch)
    omega0 = np.broadcast_to(omega0, (samples.num_realizations,))
    return 1.0 - ccdf_conditional_batch(z, omega0, omega_i, ch)


def average_from_samples(samples, ch, gamma_grid, retain=None):
    gamma_grid = np.atleast_1d(np.asarray(gamma_grid, dtype=float))
    eps = conditional_outages(samples, ch, gamma_grid)
    avg_ccdf = np.mean(1.0 - eps, axis=0)
    n = samples.num_realizations
    keep = n <= RETAIN_LIMIT if retain is None else retain
    return SpatialAverageResult(
        grid=gamma_grid, avg_ccdf=avg_ccdf, avg_outage=1.0 - avg_ccdf,
        num_realizations=n, master_seed=samples.master_seed,
        per_realization_outage=eps if keep else None,
    )


def average_outage(exp, grid, workers=1):
    """Spatially averaged outage for an experiment at each linear SNR in ``grid``."""
    samples = sample_geometry(
        exp.geometry(), exp.tx_distance, exp.sigma_s_db, exp.realizations, exp.seed, workers
    )
    return average_from_samples(samples, exp.channel(), grid)


def outage_cdf(eps, thresholds):
    """Empirical P[eps <= eps_T] for each threshold."""
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(thresholds) < 0):
        raise DomainError("thresholds must be sorted ascending")
    eps = np.sort(np.asarray(eps, dtype=float).ravel())
    return np.searchsorted(eps, thresholds, side="right") / eps.size


def network_outage_cdf(exp, gamma_snr, thresholds, workers=1):
    """Fraction of realizations whose conditional outage does not exceed each threshold."""
    res = average_outage(exp, [gamma_snr], workers)
    thresholds = np.asarray(thresholds, dtype=float)
    return NetworkOutageCdf(thresholds, outage_cdf(res.per_realization_outage[:, 0], thresholds))


def interquantile_width(eps, lo=0.1, hi=0.9):
    """Spread of the conditional outage across realizations (smaller = steeper cdf)."""
    q_lo, q_hi = np.quantile(np.asarray(eps).ravel(), [lo, hi])
    return float(q_hi - q_lo)


def transmission_capacity(density, avg_eps, per_link_rate):
    """Throughput per unit area, density * (1 - eps) * rate."""
    if density < 0 or per_link_rate <= 0 or not 0 <= avg_eps <= 1:
        raise DomainError("need density >= 0, 0 <= eps <= 1 and rate > 0")
    return density * (1.0 - avg_eps) * per_link_rate


def network_density(num_interferers, r_net=1.0):
    """Interferers per unit network area, M / (pi r_net^2)."""
    return num_interferers / (np.pi * r_net ** 2)


def sweep_m_from_samples(samples, channel_for, m_values, gamma_snr, r_net=1.0, label=""):
    """Average outage and normalized capacity versus M from nested samples.

    ``channel_for(M)`` returns the channel parameters for M interferers.
    """
    m_values = [int(m) for m in m_values]
    if any(m < 1 for m in m_values):
        raise DomainError("M values must be positive integers")
    eps = np.array([
        average_from_samples(samples.truncate(M), channel_for(M), [gamma_snr], retain=False).avg_outage[0]
        for M in m_values
    ])
    capacity = np.array([
        transmission_capacity(network_density(M, r_net), e, 1.0) for M, e in zip(m_values, eps)
    ])
    grid = np.array(m_values, dtype=float)
    return (OutageCurve("M", grid, eps, "monte-carlo", label),
            OutageCurve("M", grid, capacity, "monte-carlo", label))


def sweep_m(exp, m_values, gamma_snr, workers=1):
    """Average outage and capacity tau/b for each M (placements nested across M)."""
    m_max = max(int(m) for m in m_values)
    geom = replace(exp.geometry(), num_interferers=m_max)
    samples = sample_geometry(geom, exp.tx_distance, exp.sigma_s_db, exp.realizations, exp.seed, workers)
    return sweep_m_from_samples(
        samples, lambda M: replace(exp, num_interferers=M).channel(), m_values, gamma_snr,
        exp.r_net, label=exp.label(),
    )
