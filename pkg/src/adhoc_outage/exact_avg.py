"""Spatially averaged ccdf for uniform interferers in an annulus, no shadowing.

Each interferer's factor G_l is averaged analytically over its distance,
which reduces to a difference of Gauss hypergeometric kernels. A second,
independent evaluation integrates the same per-interferer averages by
adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn, gammaln, rgamma

from .errors import ContractError, DomainError, NumericalError
from .model import ChannelParams
from .outage import _ccdf_from_h, _check_z, h_all_convolution, h_all_index

SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 100_000

# a - b closer than this to an integer makes the 1/x connection formula
# cancel catastrophically; such points are interpolated in b instead.
_DEGENERATE_GAP = 1e-4
_PFAFF_LIMIT = -10.0


def _gauss_series(a, b, c, x):
    total = 1.0
    term = 1.0
    small = 0
    for n in range(SERIES_MAX_TERMS):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x
        term *= ratio
        total += term
        if abs(term) <= SERIES_RTOL * abs(total) and abs(ratio) < 1.0:
            small += 1
            if small == 2:
                return total
        else:
            small = 0
    raise NumericalError(
        f"2F1 series did not converge in {SERIES_MAX_TERMS} terms "
        f"(a={a}, b={b}, c={c}, x={x}, last term={term:.3e}, partial sum={total:.6e})"
    )


def _inverse_argument(a, b, c, x):
    """Connection formula onto 1/x for x < -1; requires a - b non-integer."""
    w = 1.0 / x
    lead = gamma_fn(c) * gamma_fn(b - a) * rgamma(b) * rgamma(c - a)
    tail = gamma_fn(c) * gamma_fn(a - b) * rgamma(a) * rgamma(c - b)
    out = 0.0
    if lead != 0.0:
        out += lead * (-x) ** (-a) * _gauss_series(a, a - c + 1.0, a - b + 1.0, w)
    if tail != 0.0:
        out += tail * (-x) ** (-b) * _gauss_series(b, b - c + 1.0, b - a + 1.0, w)
    return out


def _inverse_argument_degenerate(a, b, c, x, n):
    # 2F1 is analytic in b; sample it where a - b sits a safe distance from
    # the integer n and interpolate back to the requested b.
    h = _DEGENERATE_GAP
    offsets = np.array([-2.0 * h, -h, h, 2.0 * h])
    values = np.array([_inverse_argument(a, a - n - d, c, x) for d in offsets])
    target = (a - b) - n
    weights = np.ones_like(offsets)
    for j, dj in enumerate(offsets):
        for k, dk in enumerate(offsets):
            if j != k:
                weights[j] *= (target - dk) / (dj - dk)
    return float(weights @ values)


def gauss_2f1(a, b, c, x):
    """Gauss hypergeometric function 2F1(a, b; c; x) for x <= 0 and c > b > 0.

    -10 <= x < 0 uses the Pfaff transformation onto x/(x-1) in [0, 10/11],
    where every series term is positive; x < -10 uses the connection formula
    onto 1/x in (-1/10, 0).
    """
    a, b, c, x = float(a), float(b), float(c), float(x)
    if not (c > b > 0):
        raise DomainError(f"need c > b > 0, got b={b}, c={c}")
    if not x <= 0 or math.isnan(x):
        raise DomainError(f"argument must be <= 0, got {x}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        raise DomainError("argument must be finite")
    if x >= _PFAFF_LIMIT:
        return (1.0 - x) ** (-a) * _gauss_series(a, c - b, c, x / (x - 1.0))
    n = round(a - b)
    if abs((a - b) - n) < _DEGENERATE_GAP:
        if not (c > a - n + 2.0 * _DEGENERATE_GAP and a - n - 2.0 * _DEGENERATE_GAP > 0):
            raise NumericalError(
                f"cannot bracket degenerate parameters a={a}, b={b}, c={c}"
            )
        return _inverse_argument_degenerate(a, b, c, x, n)
    return _inverse_argument(a, b, c, x)


def j_kernel(y, m_i, ell_i, alpha, beta0):
    """y^(m+2/alpha) 2F1(m+l, m+2/alpha; m+2/alpha+1; -m y / beta0)."""
    if y < 0:
        raise DomainError("J(y) needs y >= 0")
    if y == 0:
        return 0.0
    b = m_i + 2.0 / alpha
    return y ** b * gauss_2f1(m_i + ell_i, b, b + 1.0, -m_i * y / beta0)


@dataclass(frozen=True)
class AnnulusAverageInputs:
    """Channel plus annulus geometry; interferers are i.i.d. uniform in the annulus."""

    ch: ChannelParams
    r_ex: float = 0.05
    r_net: float = 1.0
    tx_distance: float = 0.1

    def __post_init__(self):
        if self.ch.shadow_sigma_db != 0:
            raise ContractError("the annulus average assumes no shadowing (sigma_s = 0)")
        if not 0 <= self.r_ex < self.r_net:
            raise DomainError("need 0 <= r_ex < r_net")
        if not self.tx_distance > 0:
            raise DomainError("transmitter distance must be positive")

    @property
    def num_interferers(self):
        return self.ch.num_interferers

    @property
    def c(self):
        """(G/h)(P_0/P_i) per interferer."""
        return 1.0 / (self.ch.despread_factor * self.ch.power_ratio)

    @property
    def beta0(self):
        return self.ch.sinr_threshold * self.ch.m0 * self.tx_distance ** self.ch.alpha


def _bracket_prefactor_log(ell, m, p, alpha, c, area, beta0):
    # log of 2 p Gamma(l+m) / (alpha c^(2/alpha) (r_net^2 - r_ex^2) l! Gamma(m))
    return (math.log(2.0 * p) + gammaln(ell + m) - math.log(alpha)
            - (2.0 / alpha) * math.log(c) - math.log(area)
            - gammaln(ell + 1.0) - gammaln(m))


def _closed_bracket(ell, m, p, c, inputs):
    alpha, beta0 = inputs.ch.alpha, inputs.beta0
    base = (1.0 - p) if ell == 0 else 0.0
    if p == 0.0:
        return base
    area = inputs.r_net ** 2 - inputs.r_ex ** 2
    b = m + 2.0 / alpha
    y_hi = c * inputs.r_net ** alpha
    y_lo = c * inputs.r_ex ** alpha
    x_hi = -m * y_hi / beta0
    f_hi = gauss_2f1(m + ell, b, b + 1.0, x_hi)
    if y_lo > 0:
        f_lo = gauss_2f1(m + ell, b, b + 1.0, -m * y_lo / beta0)
        diff = f_hi - (y_lo / y_hi) ** b * f_lo
    else:
        diff = f_hi
    log_scale = (_bracket_prefactor_log(ell, m, p, alpha, c, area, beta0)
                 + m * math.log(m) - (m + ell) * math.log(beta0) - math.log(b)
                 + b * math.log(y_hi))
    return base + math.exp(log_scale) * diff


def _quadrature_bracket(ell, m, p, c, inputs, rtol=1e-13):
    alpha, beta0 = inputs.ch.alpha, inputs.beta0
    base = (1.0 - p) if ell == 0 else 0.0
    if p == 0.0:
        return base
    area = inputs.r_net ** 2 - inputs.r_ex ** 2
    u_hi = math.log(c) + alpha * math.log(inputs.r_net)
    knee = math.log(beta0 / m)
    if inputs.r_ex > 0:
        u_lo = math.log(c) + alpha * math.log(inputs.r_ex)
    else:
        # integrand decays like x^(m + 2/alpha) toward 0
        u_lo = min(knee, u_hi) - 40.0 / (m + 2.0 / alpha)

    # x = e^u: integrand x^((2-a)/a) (m x)^-l (beta0/(m x) + 1)^-(m+l) dx
    def integrand(u):
        return math.exp((2.0 / alpha) * u - ell * (math.log(m) + u)
                        - (m + ell) * math.log1p(beta0 / m * math.exp(-u)))

    # shift by the peak value so quad works on O(1) numbers
    grid = np.linspace(u_lo, u_hi, 65)
    log_peak = max(math.log(integrand(u)) if integrand(u) > 0 else -np.inf for u in grid)
    scale = math.exp(-log_peak) if np.isfinite(log_peak) else 1.0
    points = [knee] if u_lo < knee < u_hi else None
    value, err = integrate.quad(
        lambda u: integrand(u) * scale, u_lo, u_hi,
        epsabs=0.0, epsrel=rtol, limit=500, points=points,
    )
    if not np.isfinite(value) or err > 1e3 * rtol * abs(value) + 1e-300:
        raise NumericalError(
            f"bracket quadrature failed to converge (l={ell}, m={m}, c={c}, "
            f"value={value:.6e}, error estimate={err:.3e})"
        )
    log_total = _bracket_prefactor_log(ell, m, p, alpha, c, area, beta0) + math.log(value) - math.log(scale)
    return base + math.exp(log_total)


def _bracket_table(inputs, bracket):
    """(m0, M) table of averaged per-interferer factors; repeated rows are shared."""
    ch = inputs.ch
    m0 = ch.integer_m0()
    c = inputs.c
    table = np.empty((m0, ch.num_interferers))
    memo = {}
    for i in range(ch.num_interferers):
        key = (float(ch.m[i]), float(ch.p[i]), float(c[i]))
        col = memo.get(key)
        if col is None:
            col = [bracket(ell, key[0], key[1], key[2], inputs) for ell in range(m0)]
            memo[key] = col
        table[:, i] = col
    return table


def _averaged(z, inputs, bracket, method):
    scalar = np.ndim(z) == 0
    zz = _check_z(z)
    m0 = inputs.ch.integer_m0()
    if inputs.num_interferers == 0:
        H = np.eye(1, m0)[0]
    else:
        table = _bracket_table(inputs, bracket)
        H = h_all_index(table) if method == "index" else h_all_convolution(table)
    out = _ccdf_from_h(zz, np.asarray(inputs.beta0), H)
    return float(out[0]) if scalar else out


def averaged_ccdf_closed(z, inputs, method="index"):
    """Annulus-averaged P[Z > z] through the hypergeometric kernel."""
    return _averaged(z, inputs, _closed_bracket, method)


def averaged_ccdf_quadrature(z, inputs, method="index"):
    """Same quantity as :func:`averaged_ccdf_closed`, by adaptive quadrature."""
    return _averaged(z, inputs, _quadrature_bracket, method)


def averaged_outage(gamma_snr, inputs):
    """1 - averaged ccdf at z = 1/Gamma (closed form)."""
    return 1.0 - averaged_ccdf_closed(1.0 / gamma_snr, inputs)
