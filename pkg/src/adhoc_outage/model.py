"""Channel and geometry model: chip factor, path loss, shadowing, normalized powers.

Distances are measured in units of the network radius, and the reference
distance d0 and noise power are folded into the SNR ``Gamma``. The receiver
sits at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def default_chip_factor(spreading_gain):
    """Rectangular-chip average 2/3 for spread systems, 1 when unspread."""
    return 1.0 if spreading_gain == 1 else 2.0 / 3.0


@dataclass(frozen=True)
class NetworkRealization:
    """Positions (receiver at origin) and per-link shadowing in dB.

    ``transmitter`` is a length-2 array, ``interferers`` has shape (M, 2) and
    ``shadowing_db`` has length M+1 with index 0 for the reference link.
    """

    transmitter: np.ndarray
    interferers: np.ndarray
    shadowing_db: np.ndarray = None

    def __post_init__(self):
        tx = _frozen(self.transmitter).reshape(2)
        xs = _frozen(self.interferers).reshape(-1, 2)
        if self.shadowing_db is None:
            sh = np.zeros(xs.shape[0] + 1)
        else:
            sh = np.asarray(self.shadowing_db, dtype=float)
        if sh.shape != (xs.shape[0] + 1,):
            raise DomainError(
                f"shadowing_db must have length M+1={xs.shape[0] + 1}, got {sh.shape}"
            )
        if not np.hypot(*tx) > 0:
            raise DomainError("reference transmitter cannot sit on the receiver")
        object.__setattr__(self, "transmitter", tx)
        object.__setattr__(self, "interferers", xs)
        object.__setattr__(self, "shadowing_db", _frozen(sh))

    @property
    def num_interferers(self):
        return self.interferers.shape[0]

    @property
    def transmitter_distance(self):
        return float(np.hypot(*self.transmitter))

    @property
    def interferer_distances(self):
        return np.hypot(self.interferers[:, 0], self.interferers[:, 1])

    def with_shadowing(self, shadowing_db):
        return NetworkRealization(self.transmitter, self.interferers, shadowing_db)


@dataclass(frozen=True)
class ChannelParams:
    """Link-level parameters shared by all evaluations of one network.

    Per-interferer quantities (``m``, ``p``, ``power_ratio``) are arrays of
    length M. ``snr`` is the linear Gamma; outage routines take Gamma (or its
    inverse z) explicitly, this field is the run default.
    """

    alpha: float = 3.5
    spreading_gain: float = 1.0
    chip_factor: float = None
    sinr_threshold: float = 1.0
    snr: float = 10.0
    m0: int = 1
    m: np.ndarray = field(default_factory=lambda: np.zeros(0))
    p: np.ndarray = field(default_factory=lambda: np.zeros(0))
    power_ratio: np.ndarray = None
    shadow_sigma_db: float = 0.0

    def __post_init__(self):
        m = _frozen(self.m).reshape(-1)
        p = _frozen(self.p).reshape(-1)
        ratio = np.ones_like(m) if self.power_ratio is None else self.power_ratio
        ratio = _frozen(ratio).reshape(-1)
        if not (m.shape == p.shape == ratio.shape):
            raise DomainError(
                f"m, p and power_ratio lengths differ: {m.size}, {p.size}, {ratio.size}"
            )
        if self.chip_factor is None:
            object.__setattr__(self, "chip_factor", default_chip_factor(self.spreading_gain))
        if not 0.5 <= self.chip_factor <= 1.0:
            raise DomainError(f"chip factor must lie in [1/2, 1], got {self.chip_factor}")
        if self.spreading_gain < 1:
            raise DomainError(f"spreading gain must be >= 1, got {self.spreading_gain}")
        if self.sinr_threshold <= 0 or self.snr <= 0:
            raise DomainError("sinr_threshold and snr must be positive")
        if self.alpha <= 0:
            raise DomainError(f"path-loss exponent must be positive, got {self.alpha}")
        if np.any(m <= 0):
            raise DomainError("Nakagami parameters m_i must be positive")
        if np.any((p < 0) | (p > 1)):
            raise DomainError("activity probabilities must lie in [0, 1]")
        if np.any(ratio <= 0):
            raise DomainError("power ratios P_i/P_0 must be positive")
        if self.shadow_sigma_db < 0:
            raise DomainError("shadowing standard deviation must be nonnegative")
        if self.m0 <= 0:
            raise DomainError(f"m0 must be positive, got {self.m0}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "power_ratio", ratio)

    @classmethod
    def uniform(cls, num_interferers, *, m0=1, m=1.0, p=0.5, power_ratio=1.0, **kwargs):
        """Identical interferers: broadcast scalar ``m``, ``p`` and ``power_ratio``."""
        full = lambda v: np.full(num_interferers, float(v))
        return cls(
            m0=m0, m=full(m), p=full(p), power_ratio=full(power_ratio), **kwargs
        )

    @property
    def num_interferers(self):
        return self.m.size

    @property
    def despread_factor(self):
        """h/G, the interference power reduction after despreading."""
        return self.chip_factor / self.spreading_gain

    @property
    def is_rayleigh(self):
        return self.m0 == 1 and bool(np.all(self.m == 1.0))

    def integer_m0(self):
        """Return m0 as ``int`` or raise ContractError if it is not integral."""
        m0 = self.m0
        if isinstance(m0, (bool, np.bool_)) or float(m0) != int(m0) or int(m0) < 1:
            raise ContractError(f"closed form requires a positive integer m0, got {m0!r}")
        return int(m0)

    def subset(self, count):
        """Parameters for the first ``count`` interferers."""
        return ChannelParams(
            alpha=self.alpha, spreading_gain=self.spreading_gain,
            chip_factor=self.chip_factor, sinr_threshold=self.sinr_threshold,
            snr=self.snr, m0=self.m0, m=self.m[:count], p=self.p[:count],
            power_ratio=self.power_ratio[:count], shadow_sigma_db=self.shadow_sigma_db,
        )


@dataclass(frozen=True)
class NormalizedPowers:
    """Normalized received powers; ``omega[0]`` is the reference link."""

    omega: np.ndarray

    def __post_init__(self):
        om = _frozen(self.omega).reshape(-1)
        if om.size < 1 or not om[0] > 0:
            raise DomainError("omega[0] must be positive")
        if np.any(om[1:] < 0):
            raise DomainError("interferer powers must be nonnegative")
        object.__setattr__(self, "omega", om)

    @property
    def reference(self):
        return float(self.omega[0])

    @property
    def interference(self):
        return self.omega[1:]

    def __len__(self):
        return self.omega.size


def chip_factor_rectangular(offset_fraction):
    """Chip factor h for a rectangular chip at timing offset tau_o/T_c."""
    x = np.asarray(offset_fraction, dtype=float)
    if np.any((x < 0) | (x >= 1)) or np.any(~np.isfinite(x)):
        raise DomainError("chip timing offset must lie in [0, 1)")
    h = 1.0 + 2.0 * x * x - 2.0 * x
    return float(h) if h.ndim == 0 else h


def path_loss(distance, alpha):
    return np.asarray(distance, dtype=float) ** (-alpha)


def omega_from_distances(tx_distance, interferer_distances, ch, shadowing_db=None):
    """Vectorized normalized powers.

    ``interferer_distances`` may carry leading batch dimensions (..., M);
    ``tx_distance`` and ``shadowing_db`` (..., M+1) broadcast against it.
    Returns ``(omega0, omega_i)`` with shapes (...) and (..., M).
    """
    d = np.asarray(interferer_distances, dtype=float)
    d0 = np.asarray(tx_distance, dtype=float)
    if np.any(d0 <= 0):
        raise DomainError("reference transmitter distance must be positive")
    omega0 = d0 ** (-ch.alpha)
    omega_i = (ch.despread_factor * ch.power_ratio) * d ** (-ch.alpha)
    if shadowing_db is not None:
        gain = db_to_linear(shadowing_db)
        omega0 = omega0 * gain[..., 0]
        omega_i = omega_i * gain[..., 1:]
    return omega0, omega_i


def normalized_powers(net, ch):
    """Omega vector for one network realization."""
    if net.num_interferers != ch.num_interferers:
        raise DomainError(
            f"network has {net.num_interferers} interferers but channel "
            f"parameters describe {ch.num_interferers}"
        )
    omega0, omega_i = omega_from_distances(
        net.transmitter_distance, net.interferer_distances, ch, net.shadowing_db
    )
    return NormalizedPowers(np.concatenate([[omega0], omega_i]))


def draw_shadowing(sigma_db, count, rng):
    """I.i.d. zero-mean Gaussian shadowing factors in dB."""
    if sigma_db < 0:
        raise DomainError("shadowing standard deviation must be nonnegative")
    if sigma_db == 0:
        return np.zeros(count)
    return rng.normal(0.0, sigma_db, size=count)
