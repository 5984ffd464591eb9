"""Exact outage probability of finite ad hoc networks in Nakagami fading."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    ChannelParams,
    NetworkRealization,
    NormalizedPowers,
    chip_factor_rectangular,
    draw_shadowing,
    normalized_powers,
)
from .outage import ccdf_conditional, ccdf_rayleigh, outage_conditional  # noqa: E402
from .exact_avg import AnnulusAverageInputs, averaged_ccdf_closed, gauss_2f1  # noqa: E402
from .oracle import OracleConfig, simulate_outage  # noqa: E402
