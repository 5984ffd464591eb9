"""Random placement of interferers around a receiver at the origin."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SaturationError
from .model import NetworkRealization

# Candidates are drawn from the generator in fixed-size blocks, so the stream
# consumed by the first k mobiles does not depend on M.
_CHUNK = 64


class PlacementModel(str, enum.Enum):
    UNIFORM_ANNULUS = "annulus"
    UNIFORM_CLUSTERING = "clustering"


@dataclass(frozen=True)
class GeometryConfig:
    num_interferers: int
    r_net: float = 1.0
    r_ex: float = 0.05
    network_center: tuple = (0.0, 0.0)
    placement_model: PlacementModel = PlacementModel.UNIFORM_CLUSTERING
    max_rejection_attempts: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "placement_model", PlacementModel(self.placement_model))
        object.__setattr__(self, "network_center", tuple(float(c) for c in self.network_center))
        if self.num_interferers < 0:
            raise DomainError("number of interferers must be nonnegative")
        if not 0 <= self.r_ex < self.r_net:
            raise DomainError(f"need 0 <= r_ex < r_net, got r_ex={self.r_ex}, r_net={self.r_net}")
        if (self.placement_model is PlacementModel.UNIFORM_ANNULUS
                and self.network_center != (0.0, 0.0)):
            raise DomainError("annulus placement requires the network centered on the receiver")
        if self.max_rejection_attempts < 1:
            raise DomainError("max_rejection_attempts must be at least 1")

    @property
    def on_perimeter(self):
        return self.network_center != (0.0, 0.0)


def offset_to_perimeter(geom):
    """Move the network so the receiver (origin) sits on its boundary."""
    return replace(geom, network_center=(-geom.r_net, 0.0))


def place_uniform_annulus(geom, rng, transmitter=(0.1, 0.0)):
    """Independent uniform interferers in the annulus r_ex <= r <= r_net."""
    if geom.placement_model is not PlacementModel.UNIFORM_ANNULUS:
        raise DomainError("geometry is not configured for annulus placement")
    u = rng.random((geom.num_interferers, 2))
    r2_lo, r2_hi = geom.r_ex ** 2, geom.r_net ** 2
    r = np.sqrt(r2_lo + u[:, 0] * (r2_hi - r2_lo))
    theta = 2.0 * np.pi * u[:, 1]
    points = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    return NetworkRealization(transmitter, points)


def _disk_block(rng, center, radius):
    u = rng.random((_CHUNK, 2))
    r = np.sqrt(u[:, 0]) * radius
    theta = 2.0 * np.pi * u[:, 1]
    return center[0] + r * np.cos(theta), center[1] + r * np.sin(theta)


def place_uniform_clustering(geom, transmitter, rng):
    """Sequential uniform placement with rejection inside exclusion zones.

    Each interferer is drawn uniformly over the network disk and redrawn until
    it is at least ``r_ex`` away from the receiver, the reference transmitter
    and every interferer placed before it.
    """
    if geom.placement_model is not PlacementModel.UNIFORM_CLUSTERING:
        raise DomainError("geometry is not configured for clustering placement")
    M = geom.num_interferers
    tx = np.asarray(transmitter, dtype=float).reshape(2)
    xs = np.empty(M + 2)
    ys = np.empty(M + 2)
    xs[0], ys[0] = 0.0, 0.0
    xs[1], ys[1] = tx
    r_ex2 = geom.r_ex ** 2
    cx, cy = [], []
    pos = 0

    for k in range(M):
        for attempt in range(geom.max_rejection_attempts):
            if pos == len(cx):
                bx, by = _disk_block(rng, geom.network_center, geom.r_net)
                cx, cy = bx.tolist(), by.tolist()
                pos = 0
            x, y = cx[pos], cy[pos]
            pos += 1
            n = k + 2
            if r_ex2 == 0.0:
                break
            d2 = (xs[:n] - x) ** 2 + (ys[:n] - y) ** 2
            if d2.min() >= r_ex2:
                break
        else:
            raise SaturationError(
                f"placed {k} of {M} interferers; interferer {k + 1} was rejected "
                f"{geom.max_rejection_attempts} times (r_ex={geom.r_ex})",
                placed=k, requested=M,
            )
        xs[k + 2], ys[k + 2] = x, y

    return NetworkRealization(tx, np.column_stack([xs[2:], ys[2:]]))


def place(geom, transmitter, rng):
    """Dispatch on ``geom.placement_model``."""
    if geom.placement_model is PlacementModel.UNIFORM_ANNULUS:
        return place_uniform_annulus(geom, rng, transmitter)
    return place_uniform_clustering(geom, transmitter, rng)
