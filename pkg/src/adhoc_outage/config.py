"""Experiment configuration: flat ``key = value`` text with ``#`` comments.

dB-valued fields (``gamma_db``, ``beta_db``, ``sigma_s_db``) are converted to
linear units once, by the accessors below; everything downstream is linear.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError
from .model import ChannelParams, db_to_linear
from .placement import GeometryConfig, PlacementModel

SWEEP_AXES = ("gamma", "M", "eps_t")


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = None
    sweep: str = None

    # channel
    alpha: float = 3.5
    spreading_gain: float = 1.0
    chip_factor: float = None
    beta_db: float = 0.0
    gamma_db: float = 10.0
    m0: int = 4
    m: float = 1.0
    p: float = 0.5
    power_ratio: float = 1.0
    sigma_s_db: float = 0.0

    # geometry
    num_interferers: int = 28
    r_net: float = 1.0
    r_ex: float = 0.05
    tx_distance: float = 0.1
    placement: str = "clustering"
    receiver: str = "center"
    max_rejection_attempts: int = 10_000

    # sweeps
    gamma_db_grid: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
    m_grid: tuple = tuple(range(10, 101, 10))
    eps_t_grid: tuple = tuple(float(v) for v in np.round(np.linspace(0.0, 1.0, 101), 10))

    # Monte Carlo
    realizations: int = 10_000
    oracle: bool = True
    trials: int = 1_000_000
    seed: int = 1
    network_seed: int = 2
    workers: int = 1

    def __post_init__(self):
        if self.sweep is not None and self.sweep not in SWEEP_AXES:
            raise ConfigError(f"sweep must be one of {SWEEP_AXES}, got {self.sweep!r}", field="sweep")
        if self.receiver not in ("center", "perimeter"):
            raise ConfigError("receiver must be 'center' or 'perimeter'", field="receiver")
        try:
            PlacementModel(self.placement)
        except ValueError:
            raise ConfigError(
                f"placement must be 'clustering' or 'annulus', got {self.placement!r}", field="placement"
            ) from None
        for name in ("realizations", "trials"):
            if getattr(self, name) < 1:
                raise ConfigError("must be at least 1", field=name)

    @property
    def gamma(self):
        return float(db_to_linear(self.gamma_db))

    @property
    def beta(self):
        return float(db_to_linear(self.beta_db))

    def channel(self, num_interferers=None):
        M = self.num_interferers if num_interferers is None else num_interferers
        return ChannelParams.uniform(
            M, m0=self.m0, m=self.m, p=self.p, power_ratio=self.power_ratio,
            alpha=self.alpha, spreading_gain=self.spreading_gain, chip_factor=self.chip_factor,
            sinr_threshold=self.beta, snr=self.gamma, shadow_sigma_db=self.sigma_s_db,
        )

    def geometry(self):
        center = (-self.r_net, 0.0) if self.receiver == "perimeter" else (0.0, 0.0)
        return GeometryConfig(
            num_interferers=self.num_interferers, r_net=self.r_net, r_ex=self.r_ex,
            network_center=center, placement_model=PlacementModel(self.placement),
            max_rejection_attempts=self.max_rejection_attempts,
        )

    def label(self):
        return f"m0={self.m0},m={self.m:g},G={self.spreading_gain:g},sigma={self.sigma_s_db:g}"

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_text(self):
        """Every field as ``key = value`` lines, parseable by :func:`parse_config`."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format_value(value)}")
        return "\n".join(lines) + "\n"


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


_BOOL = {"true": True, "yes": True, "on": True, "1": True,
         "false": False, "no": False, "off": False, "0": False}


def _field_types():
    out = {}
    defaults = ExperimentConfig()
    for f in fields(ExperimentConfig):
        default = getattr(defaults, f.name)
        if isinstance(default, bool):
            out[f.name] = "bool"
        elif isinstance(default, tuple):
            out[f.name] = "int_tuple" if f.name == "m_grid" else "float_tuple"
        elif f.name in ("preset", "sweep", "placement", "receiver"):
            out[f.name] = "str"
        elif isinstance(default, int) and f.name != "spreading_gain":
            out[f.name] = "int"
        else:
            out[f.name] = "float"
    return out


FIELD_TYPES = _field_types()


def _convert(name, raw, line=None):
    kind = FIELD_TYPES[name]
    try:
        if kind == "str":
            return raw
        if kind == "bool":
            return _BOOL[raw.lower()]
        if kind == "int":
            value = float(raw)
            if value != int(value):
                raise ValueError(f"expected an integer, got {raw!r}")
            return int(value)
        if kind == "float":
            return float(raw)
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if kind == "int_tuple":
            return tuple(int(s) for s in items)
        return tuple(float(s) for s in items)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad value {raw!r} ({exc})", line=line, field=name) from None


def parse_config(text):
    """Parse ``key = value`` lines into a dict of typed overrides."""
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", line=lineno, field=key)
        if key in values:
            raise ConfigError("duplicate key", line=lineno, field=key)
        values[key] = _convert(key, raw, lineno)
    return values


def required_fields_message():
    return "configuration must set 'preset' (one of the named experiments) or 'sweep' (gamma, M or eps_t)"


def load_config(text, base=None):
    """Build an ExperimentConfig from text; ``base`` supplies preset defaults."""
    overrides = parse_config(text)
    if not overrides:
        raise ConfigError("empty configuration: " + required_fields_message())
    cfg = base if base is not None else ExperimentConfig()
    return dataclasses.replace(cfg, **overrides)
