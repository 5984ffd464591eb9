"""Exact outage probability conditioned on the normalized powers.

The complementary cdf of Z = S - sum(Y_i) is a finite double sum over
s < m0 and t <= s whose inner coefficients H_t are sums, over all index
tuples (l_1..l_M) with total t, of products of per-interferer factors
G_l(Psi_i). Two evaluators for H_t are provided: the index-matrix scheme
(rows of all compositions of t) and a truncated polynomial product, which
computes the same coefficients in O(M m0^2) and vectorizes over many networks.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import comb, xlogy, gammaln

from .errors import ContractError, DomainError, ResourceError
from .model import NormalizedPowers


@dataclass(frozen=True)
class IndexMatrix:
    """All M-tuples of nonnegative integers summing to ``t`` (one per row)."""

    t: int
    num_columns: int
    rows: np.ndarray

    @property
    def row_count(self):
        return self.rows.shape[0]


class _IndexCache:
    def __init__(self, max_rows=10_000_000):
        self.max_rows = max_rows
        self._store = {}
        self._rows = 0
        self._lock = threading.Lock()

    def get(self, t, M):
        key = (t, M)
        hit = self._store.get(key)
        if hit is not None:
            return hit
        count = int(comb(t + M - 1, t, exact=True))
        if count > self.max_rows:
            raise ResourceError(
                f"index matrix for t={t}, M={M} has {count} rows, above the cap of {self.max_rows}"
            )
        built = _build_index_matrix(t, M)
        with self._lock:
            hit = self._store.get(key)
            if hit is not None:
                return hit
            if self._rows + count <= self.max_rows:
                self._store[key] = built
                self._rows += count
        return built

    def clear(self):
        with self._lock:
            self._store.clear()
            self._rows = 0


_index_cache = _IndexCache()


def set_index_cache_cap(max_rows):
    """Change the total-row budget of the index-matrix cache (clears it)."""
    _index_cache.clear()
    _index_cache.max_rows = int(max_rows)


def _build_index_matrix(t, M):
    combos = list(itertools.combinations_with_replacement(range(M), t))
    rows = np.zeros((len(combos), M), dtype=np.int64)
    if t > 0:
        which = np.array(combos, dtype=np.int64)
        np.add.at(rows, (np.repeat(np.arange(len(combos)), t), which.ravel()), 1)
    # colexicographic: last column is the primary sort key
    rows = rows[np.lexsort(rows.T)]
    rows.setflags(write=False)
    return IndexMatrix(t, M, rows)


def enumerate_indices(t, M):
    """Index matrix of all compositions of ``t`` into ``M`` nonnegative parts.

    Results are cached per (t, M) subject to a total-row cap.
    """
    if t < 0 or M < 1:
        raise DomainError(f"need t >= 0 and M >= 1, got t={t}, M={M}")
    return _index_cache.get(int(t), int(M))


def beta0_of(omega0, ch):
    """beta * m0 / Omega_0."""
    return ch.sinr_threshold * ch.m0 / np.asarray(omega0, dtype=float)


def psi_vector(omega, ch, beta0):
    """Psi_i = (beta0 Omega_i / m_i + 1)^-1 for each interferer."""
    omega_i = omega.interference if isinstance(omega, NormalizedPowers) else np.asarray(omega)
    beta0 = np.asarray(beta0, dtype=float)
    return 1.0 / (1.0 + beta0[..., None] * omega_i / ch.m)


def g_table(psi, omega, ch, max_ell, beta0=None):
    """Matrix of per-interferer factors G_l(Psi_i), shape (max_ell+1, M).

    Leading batch dimensions on ``psi``/``omega`` are carried through, giving
    shape (..., max_ell+1, M). Passing ``beta0`` lets log(Psi_i) be formed
    with log1p, which keeps G_0 accurate for very weak interferers.
    """
    omega_i = omega.interference if isinstance(omega, NormalizedPowers) else np.asarray(omega)
    psi = np.asarray(psi, dtype=float)
    m, p = ch.m, ch.p
    shape = psi.shape[:-1] + (max_ell + 1, psi.shape[-1])
    g = np.empty(shape)
    if beta0 is None:
        log_psi = np.log(psi)
    else:
        log_psi = -np.log1p(np.asarray(beta0, dtype=float)[..., None] * omega_i / m)
    psi_m = np.exp(m * log_psi)
    g[..., 0, :] = 1.0 - p * -np.expm1(m * log_psi)
    term = psi_m
    ratio = omega_i / m * psi
    for ell in range(1, max_ell + 1):
        # rising factorial m(m+1)...(m+l-1) / l!
        term = term * (m + ell - 1) / ell * ratio
        g[..., ell, :] = p * term
    return g


def h_t(g, idx):
    """H_t from the index matrix: sum over rows of prod_i G_{l_i}(Psi_i)."""
    g = np.asarray(g)
    if idx.t >= g.shape[-2]:
        raise DomainError(f"index order t={idx.t} exceeds table rows {g.shape[-2]}")
    if idx.num_columns != g.shape[-1]:
        raise DomainError("index matrix and G table disagree on M")
    cols = np.arange(idx.num_columns)
    picked = g[..., idx.rows, cols]
    return picked.prod(axis=-1).sum(axis=-1)


def h_all_index(g):
    """H_0..H_{L-1} via index matrices for a (L, M) table."""
    L, M = g.shape[-2:]
    if M == 0:
        return np.eye(1, L)[0]
    return np.array([h_t(g, enumerate_indices(t, M)) for t in range(L)])


def h_all_convolution(g):
    """H_0..H_{L-1} as coefficients of prod_i sum_l G_l(Psi_i) u^l, truncated.

    Accepts batched tables of shape (..., L, M) and returns (..., L).
    """
    g = np.asarray(g, dtype=float)
    L, M = g.shape[-2:]
    poly = np.zeros(g.shape[:-2] + (L,))
    poly[..., 0] = 1.0
    for i in range(M):
        gi = g[..., :, i]
        new = poly * gi[..., :1]
        for ell in range(1, L):
            new[..., ell:] += poly[..., : L - ell] * gi[..., ell : ell + 1]
        poly = new
    return poly


def _ccdf_from_h(z, beta0, H):
    """exp(-b z) sum_s (b z)^s sum_{t<=s} z^-t H_t / (s-t)!, for b=beta0.

    ``z`` has shape (K,), ``beta0`` shape (...), ``H`` shape (..., m0).
    Returns (..., K).
    """
    z = np.asarray(z, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    m0 = H.shape[-1]
    out = np.zeros(beta0.shape + z.shape)
    log_b = np.log(beta0)[..., None]
    bz = beta0[..., None] * z
    for t in range(m0):
        Ht = H[..., t][..., None]
        # s = t + k: beta0^s z^(s-t) = beta0^t (beta0 z)^k
        for k in range(m0 - t):
            log_term = t * log_b + xlogy(k, bz) - bz - gammaln(k + 1)
            out += Ht * np.exp(log_term)
    return np.clip(out, 0.0, 1.0)


def _check_z(z):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0) or np.any(np.isnan(z)):
        raise DomainError("z must be nonnegative")
    return z


def _check_lengths(omega, ch):
    if len(omega) - 1 != ch.num_interferers:
        raise DomainError(
            f"omega has {len(omega) - 1} interferers, channel parameters {ch.num_interferers}"
        )


def ccdf_conditional(z, omega, ch, method="index"):
    """P[Z > z | Omega] for integer m0 and arbitrary positive m_i.

    ``z`` may be a scalar or 1-D array; z = 0 gives the interference-limited
    value. ``method`` selects the H_t evaluator: ``"index"`` (index
    matrices) or ``"convolution"``.
    """
    scalar = np.ndim(z) == 0
    m0 = ch.integer_m0()
    _check_lengths(omega, ch)
    zz = _check_z(z)
    beta0 = beta0_of(omega.reference, ch)
    psi = psi_vector(omega, ch, beta0)
    g = g_table(psi, omega, ch, m0 - 1, beta0=beta0)
    if method == "index":
        H = h_all_index(g)
    elif method == "convolution":
        H = h_all_convolution(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = _ccdf_from_h(zz, beta0, H)
    return float(out[0]) if scalar else out


def ccdf_rayleigh(z, omega, ch):
    """Product-form ccdf when every link is Rayleigh faded."""
    if not ch.is_rayleigh:
        raise ContractError("Rayleigh product form needs m0 = 1 and all m_i = 1")
    _check_lengths(omega, ch)
    scalar = np.ndim(z) == 0
    zz = _check_z(z)
    out = _rayleigh_batch(zz, np.asarray(omega.reference), omega.interference, ch)
    return float(out[0]) if scalar else out


def _rayleigh_batch(z, omega0, omega_i, ch):
    beta0 = ch.sinr_threshold / omega0
    b = beta0[..., None] * omega_i
    log_prod = np.sum(np.log1p(b * (1.0 - ch.p)) - np.log1p(b), axis=-1)
    return np.clip(np.exp(log_prod[..., None] - beta0[..., None] * z), 0.0, 1.0)


def ccdf_conditional_batch(z, omega0, omega_i, ch):
    """Vectorized ccdf for N networks at once.

    ``omega0`` has shape (N,), ``omega_i`` shape (N, M), ``z`` shape (K,).
    Returns an (N, K) array.
    """
    zz = _check_z(z)
    omega0 = np.asarray(omega0, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    if ch.is_rayleigh:
        return _rayleigh_batch(zz, omega0, omega_i, ch)
    m0 = ch.integer_m0()
    beta0 = beta0_of(omega0, ch)
    psi = psi_vector(omega_i, ch, beta0)
    g = g_table(psi, omega_i, ch, m0 - 1, beta0=beta0)
    return _ccdf_from_h(zz, beta0, h_all_convolution(g))


def outage_conditional(gamma_snr, omega, ch):
    """epsilon = 1 - P[Z > 1/Gamma | Omega]; ``gamma_snr`` is linear."""
    scalar = np.ndim(gamma_snr) == 0
    gam = np.atleast_1d(np.asarray(gamma_snr, dtype=float))
    if np.any(gam <= 0) or np.any(np.isnan(gam)):
        raise DomainError("SNR must be positive")
    with np.errstate(divide="ignore"):
        z = 1.0 / gam
    if ch.is_rayleigh:
        ccdf = ccdf_rayleigh(z, omega, ch)
    else:
        ccdf = ccdf_conditional(z, omega, ch)
    eps = 1.0 - ccdf
    return float(eps[0]) if scalar else eps


def incomplete_gamma_ccdf(z, beta0, m0):
    """Interference-free ccdf exp(-b z) sum_{s<m0} (b z)^s / s!."""
    bz = beta0 * np.asarray(z, dtype=float)
    return np.exp(-bz) * sum(bz ** s / math.factorial(s) for s in range(m0))
