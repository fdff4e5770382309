import numpy as np
import pytest

from uwbpowergame.channel import ChannelConfig, apdp_variance, db_to_linear, draw_channels


def test_apdp_endpoints():
    s = 2.5e-3
    assert apdp_variance(1, 200, 100.0, s) == s
    assert apdp_variance(200, 200, 100.0, s) == pytest.approx(s / 100, rel=1e-14)
    assert apdp_variance(101, 201, 100.0, s) == pytest.approx(s * 0.1, rel=1e-14)


def test_apdp_single_path():
    assert apdp_variance(1, 1, 100.0, 0.7) == 0.7


@pytest.mark.parametrize("args", [(0, 5, 10.0, 1.0), (6, 5, 10.0, 1.0), (1, 5, 1.0, 1.0), (1, 5, 10.0, 0.0)])
def test_apdp_domain_errors(args):
    with pytest.raises(ValueError):
        apdp_variance(*args)


def test_apdp_strictly_decreasing():
    v = apdp_variance(np.arange(1, 51), 50, 30.0, 1.0)
    assert np.all(np.diff(v) < 0)


@pytest.mark.parametrize("kwargs", [
    dict(num_users=0, num_paths=5, pdp_ratio=10.0),
    dict(num_users=2, num_paths=0, pdp_ratio=10.0),
    dict(num_users=2, num_paths=5, pdp_ratio=1.0),
    dict(num_users=2, num_paths=5, pdp_ratio=10.0, distance_range=(0.0, 3.0)),
    dict(num_users=2, num_paths=5, pdp_ratio=10.0, distance_range=(5.0, 3.0)),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ChannelConfig(**kwargs)


def test_deterministic_for_seed():
    cfg = ChannelConfig(4, 30, 100.0, seed=99)
    a, b = draw_channels(cfg, 3), draw_channels(cfg, 3)
    np.testing.assert_array_equal(a.gains, b.gains)
    np.testing.assert_array_equal(a.distances, b.distances)
    assert not np.array_equal(a.gains, draw_channels(cfg, 4).gains)


def test_user_stream_independent_of_user_count():
    small = draw_channels(ChannelConfig(2, 16, 10.0, seed=5), 0)
    large = draw_channels(ChannelConfig(6, 16, 10.0, seed=5), 0)
    np.testing.assert_array_equal(small.gains, large.gains[:2])


def test_profile_and_distances(fig2_channel):
    ch = draw_channels(fig2_channel, 0)
    L = fig2_channel.num_paths
    ratios = ch.variances[:, :-1] / ch.variances[:, 1:]
    np.testing.assert_allclose(ratios, fig2_channel.pdp_ratio ** (1 / (L - 1)), rtol=1e-12)
    np.testing.assert_allclose(ch.variances[:, 0] / ch.variances[:, -1], db_to_linear(20.0), rtol=1e-12)
    assert np.all((ch.distances >= 3.0) & (ch.distances <= 30.0))
    np.testing.assert_allclose(ch.variances[:, 0], 0.3 * ch.distances ** -2, rtol=1e-15)


def test_single_path_profile():
    ch = draw_channels(ChannelConfig(3, 1, 10.0, seed=1))
    assert ch.gains.shape == (3, 1)
    np.testing.assert_allclose(ch.variances[:, 0], 0.3 * ch.distances ** -2)


def test_arrays_are_read_only():
    ch = draw_channels(ChannelConfig(2, 4, 10.0))
    with pytest.raises(ValueError):
        ch.gains[0, 0] = 0


def test_first_tap_second_moment():
    # fixed distance so the tap variance is known exactly
    cfg = ChannelConfig(1, 4, 10.0, distance_range=(10.0, 10.0), seed=2024)
    taps = np.array([draw_channels(cfg, r).gains[0] for r in range(100_000)])
    expected = 0.3 / 100.0 * apdp_variance(np.arange(1, 5), 4, 10.0, 1.0)
    power = np.mean(np.abs(taps) ** 2, axis=0)
    assert abs(power[0] / expected[0] - 1) < 0.02
    np.testing.assert_allclose(power, expected, rtol=0.05)
    np.testing.assert_allclose(np.var(taps.real, axis=0), expected / 2, rtol=0.05)
    assert np.all(np.abs(np.mean(taps, axis=0)) < 5 * np.sqrt(expected / 100_000))
