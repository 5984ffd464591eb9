import numpy as np
import pytest

from adhoc_outage.errors import ContractError, DomainError
from adhoc_outage.model import (
    ChannelParams,
    NetworkRealization,
    NormalizedPowers,
    chip_factor_rectangular,
    db_to_linear,
    default_chip_factor,
    draw_shadowing,
    linear_to_db,
    normalized_powers,
    omega_from_distances,
)


def test_db_round_trip():
    x = np.array([-30.0, 0.0, 3.0, 25.0])
    assert np.allclose(linear_to_db(db_to_linear(x)), x)
    assert db_to_linear(10.0) == pytest.approx(10.0)


def test_chip_factor_defaults():
    assert default_chip_factor(1) == 1.0
    assert default_chip_factor(32) == pytest.approx(2 / 3)
    assert ChannelParams.uniform(2, spreading_gain=8).chip_factor == pytest.approx(2 / 3)


def test_chip_factor_rectangular():
    assert chip_factor_rectangular(0.0) == 1.0
    assert chip_factor_rectangular(0.5) == pytest.approx(0.5)
    # average over a uniform offset is 2/3
    x = np.linspace(0, 1, 200001)[:-1]
    assert chip_factor_rectangular(x).mean() == pytest.approx(2 / 3, abs=1e-5)
    with pytest.raises(DomainError):
        chip_factor_rectangular(1.0)


def test_omega_hand_computed():
    ch = ChannelParams.uniform(2, m0=1, m=1.0, p=0.5, power_ratio=2.0, alpha=3.0,
                               spreading_gain=32)
    net = NetworkRealization((0.1, 0.0), [[0.5, 0.0], [0.0, -0.25]], [3.0, 0.0, -3.0])
    om = normalized_powers(net, ch)
    assert om.reference == pytest.approx(10 ** 0.3 * 0.1 ** -3)
    h_over_g = (2 / 3) / 32
    assert om.interference[0] == pytest.approx(h_over_g * 2 * 0.5 ** -3)
    assert om.interference[1] == pytest.approx(h_over_g * 2 * 10 ** -0.3 * 0.25 ** -3)


def test_omega_batch_matches_single(rng):
    ch = ChannelParams.uniform(5, m0=2, m=1.5, alpha=3.5)
    d = rng.uniform(0.05, 1, (7, 5))
    sh = rng.normal(0, 8, (7, 6))
    o0, oi = omega_from_distances(0.1, d, ch, sh)
    for k in range(7):
        a, b = omega_from_distances(0.1, d[k], ch, sh[k])
        assert o0[k] == pytest.approx(a) and np.allclose(oi[k], b)


def test_channel_validation():
    with pytest.raises(DomainError):
        ChannelParams.uniform(3, p=1.5)
    with pytest.raises(DomainError):
        ChannelParams.uniform(3, m=0.0)
    with pytest.raises(DomainError):
        ChannelParams(m=[1, 1], p=[0.5])
    with pytest.raises(DomainError):
        ChannelParams.uniform(1, chip_factor=0.3)
    with pytest.raises(ContractError):
        ChannelParams.uniform(2, m0=2.5).integer_m0()
    assert ChannelParams.uniform(2, m0=4).integer_m0() == 4


def test_subset_and_rayleigh_flag():
    ch = ChannelParams.uniform(6, m0=1, m=1.0)
    assert ch.is_rayleigh
    assert ch.subset(3).num_interferers == 3
    assert not ChannelParams.uniform(2, m0=4, m=1.0).is_rayleigh


def test_realization_validation():
    with pytest.raises(DomainError):
        NetworkRealization((0.0, 0.0), np.zeros((1, 2)))
    with pytest.raises(DomainError):
        NetworkRealization((0.1, 0.0), np.zeros((2, 2)), [0.0, 0.0])
    with pytest.raises(DomainError):
        NormalizedPowers([0.0, 1.0])
    with pytest.raises(DomainError):
        normalized_powers(NetworkRealization((0.1, 0), np.ones((2, 2))), ChannelParams.uniform(3))


def test_shadowing_draws(rng):
    assert np.all(draw_shadowing(0.0, 5, rng) == 0)
    x = draw_shadowing(8.0, 200000, rng)
    assert x.mean() == pytest.approx(0, abs=0.1)
    assert x.std() == pytest.approx(8, rel=0.01)
