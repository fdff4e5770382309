import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dense_gains
from uwbpowergame.channel import ChannelConfig, draw_channels
from uwbpowergame.rake import RakeConfig, compute_gains, num_fingers, phi_coefficients, prake_weights


def complex_taps(rng, K, L):
    return rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L))


def test_arake_is_identity(rng):
    a = complex_taps(rng, 1, 7)[0]
    np.testing.assert_array_equal(prake_weights(a, 1.0), a)


def test_single_finger(rng):
    a = complex_taps(rng, 1, 9)[0]
    b = prake_weights(a, 0.1)
    assert b[0] == a[0] and np.all(b[1:] == 0)


def test_finger_count():
    a = np.arange(1, 11, dtype=complex)
    assert np.count_nonzero(prake_weights(a, 0.2)) == 2
    assert num_fingers(200, 0.2) == 40
    assert num_fingers(10, 0.01) == 1
    assert num_fingers(10, 0.25) == 3


@pytest.mark.parametrize("rho", [0.0, -0.1, 1.01])
def test_finger_fraction_domain(rho):
    with pytest.raises(ValueError):
        prake_weights(np.ones(4), rho)


def test_phi():
    np.testing.assert_array_equal(phi_coefficients(6, 1), np.ones(5))
    np.testing.assert_allclose(phi_coefficients(5, 2), [1, 1, 1, np.sqrt(0.5)])
    assert phi_coefficients(1, 3).size == 0
    phi = phi_coefficients(40, 7)
    assert np.all(np.diff(phi) <= 0) and np.all((phi > 0) & (phi <= 1))


def test_rake_config():
    r = RakeConfig.from_frames(16, 8, 0.5)
    assert r.processing_gain == 128 and r.frames_per_symbol == 16
    with pytest.raises(ValueError):
        RakeConfig.from_gain(128, 10, 1.0)
    assert RakeConfig.from_gain(128, 10, 1.0, strict=False).frames_per_symbol == 12.8
    with pytest.raises(ValueError):
        RakeConfig(1.0, 1, 16, combining="egc")


def test_single_path_collapses(rng):
    a = complex_taps(rng, 3, 1)
    g = compute_gains(a, RakeConfig(1.0, 1, 32))
    np.testing.assert_array_equal(g.h_si, 0)
    assert np.all(np.isinf(g.zeta))
    expected = np.abs(a[:, 0])[None, :] ** 2 / 32 * np.ones((3, 1))
    np.fill_diagonal(expected, 0)
    np.testing.assert_allclose(g.h_mai, expected, rtol=1e-12)


@pytest.mark.parametrize("nc", [1, 2, 5])
def test_two_paths_hand_expansion(nc):
    a1, a2, N = 0.8, -0.3, 20
    g = compute_gains(np.array([[a1, a2]]), RakeConfig(1.0, nc, N))
    phi1_sq = 1.0 / nc
    assert g.h_si[0] == pytest.approx(phi1_sq * (2 * a1 * a2) ** 2 / (N * (a1**2 + a2**2)), rel=1e-12)
    assert g.h_sp[0] == pytest.approx(a1**2 + a2**2, rel=1e-14)


@pytest.mark.parametrize("seed", range(20))
def test_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    K = int(rng.integers(1, 5))
    L = int(rng.integers(1, 17))
    nc = int(rng.choice([1, 2, 4, 7]))
    rho = float(rng.choice([0.2, 0.5, 1.0]))
    N = nc * int(rng.integers(2, 20))
    a = complex_taps(rng, K, L) * rng.uniform(0.1, 2.0, (K, 1))
    g = compute_gains(a, RakeConfig(rho, nc, N))
    sp, si, mai = dense_gains(a, rho, nc, N)
    np.testing.assert_allclose(g.h_sp, sp, rtol=1e-10)
    np.testing.assert_allclose(g.h_si, si, rtol=1e-10, atol=1e-300)
    np.testing.assert_allclose(g.h_mai, mai, rtol=1e-10)


def test_cdma_is_nc_one_special_case(rng):
    a = complex_taps(rng, 3, 12)
    cdma = compute_gains(a, RakeConfig.from_frames(64, 1, 1.0))
    same = compute_gains(a, RakeConfig(1.0, 1, 64))
    np.testing.assert_array_equal(cdma.h_si, same.h_si)
    np.testing.assert_array_equal(cdma.h_mai, same.h_mai)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    scale=st.floats(1e-3, 1e3),
    rho=st.sampled_from([0.25, 0.5, 1.0]),
    nc=st.integers(1, 6),
)
def test_scale_invariance_and_signs(seed, scale, rho, nc):
    rng = np.random.default_rng(seed)
    a = complex_taps(rng, 3, 10)
    rake = RakeConfig(rho, nc, 12 * nc)
    g = compute_gains(a, rake)
    gs = compute_gains(a * scale, rake)
    np.testing.assert_allclose(gs.h_sp, g.h_sp * scale**2, rtol=1e-10)
    np.testing.assert_allclose(gs.zeta, g.zeta, rtol=1e-9)
    assert np.all(g.h_si >= 0) and np.all(g.h_mai >= 0)


def test_zeta_reported_not_clamped():
    # one strong trailing tap behind a weak finger gives SI larger than SP
    a = np.array([[0.01, 5.0, 5.0, 5.0]])
    g = compute_gains(a, RakeConfig(0.25, 1, 1))
    assert g.zeta[0] < 1
    assert g.zeta_violations().tolist() == [0]


def test_zeta_at_least_one_on_model_channels():
    cfg = ChannelConfig(5, 200, 100.0, seed=3)
    for r in range(20):
        ch = draw_channels(cfg, r)
        for rake in (RakeConfig(1.0, 1, 128), RakeConfig(0.2, 50, 200)):
            assert compute_gains(ch, rake).zeta_violations().size == 0


def test_degenerate_channel_rejected():
    with pytest.raises(ValueError):
        compute_gains(np.array([[0.0, 1.0], [1.0, 1.0]]), RakeConfig(0.5, 1, 8))
