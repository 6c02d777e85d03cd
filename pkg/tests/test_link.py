import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmwsscm import LinkConfig, RngStream
from mmwsscm.link import draw_distance, draw_link, path_loss_nlos, received_power


def test_distance_range(rng):
    cfg = LinkConfig()
    d = [draw_distance(cfg, rng) for _ in range(2000)]
    assert min(d) >= 60 and max(d) < 200


def test_degenerate_distance(rng):
    assert draw_distance(LinkConfig(d_min=100, d_max=100), rng) == 100


def test_standards_range(rng):
    d = [draw_distance(LinkConfig(d_min=1, d_max=200), rng) for _ in range(2000)]
    assert min(d) >= 1 and max(d) < 200
    assert min(d) < 60


@pytest.mark.parametrize("d,shadow,expected", [
    (1, 0, 61.4),
    (100, 0, 129.4),     # 61.4 + 34 * 2
    (100, 9.7, 139.1),
])
def test_path_loss_values(d, shadow, expected):
    assert path_loss_nlos(LinkConfig(), d, shadow) == pytest.approx(expected, abs=1e-12)


def test_path_loss_at_1m_is_exact():
    assert path_loss_nlos(LinkConfig(), 1.0, 0.0) == 61.4


def test_path_loss_below_reference_distance():
    with pytest.raises(ValueError):
        path_loss_nlos(LinkConfig(), 0.5)


@pytest.mark.parametrize("pt,g,pl,expected", [
    (30, 0, 129.4, -99.4),
    (0, 0, 0, 0),
    (30, 24.5, 139.1, -60.1),
])
def test_received_power(pt, g, pl, expected):
    cfg = LinkConfig(tx_power_dbm=pt, tx_gain_dbi=g, rx_gain_dbi=g)
    assert received_power(cfg, pl) == pytest.approx(expected, abs=1e-12)


@given(d1=st.floats(1, 1e4), d2=st.floats(1, 1e4), shadow=st.floats(-30, 30))
def test_path_loss_monotone(d1, d2, shadow):
    cfg = LinkConfig()
    if d1 < d2:
        assert path_loss_nlos(cfg, d1, shadow) < path_loss_nlos(cfg, d2, shadow)


@given(pl=st.floats(0, 250), pt=st.floats(-10, 40), g=st.floats(0, 30))
def test_received_power_reciprocity(pl, pt, g):
    cfg = LinkConfig(tx_power_dbm=pt, tx_gain_dbi=g, rx_gain_dbi=g)
    assert received_power(cfg, pl) + pl - 2 * g == pytest.approx(pt, abs=1e-9)


def test_link_state_invariants(rng):
    cfg = LinkConfig()
    for _ in range(200):
        s = draw_link(cfg, rng)
        assert s.path_loss_db == pytest.approx(61.4 + 34 * np.log10(s.distance_m) + s.shadow_db, abs=1e-12)
        assert s.free_space_delay_ns == pytest.approx(s.distance_m / 0.3)
        assert s.omni_rx_power_dbm == pytest.approx(79.0 - s.path_loss_db)


def test_shadowing_std():
    cfg = LinkConfig()
    shadows = RngStream(3).normal(0.0, cfg.shadow_sigma_db, size=10**6)
    assert abs(shadows.std() - 9.7) < 0.1


def test_unit_conversion_on_arrays():
    from mmwsscm.link import dbm_to_mw, mw_to_dbm

    np.testing.assert_allclose(mw_to_dbm(np.array([1.0, 1e-10])), [0.0, -100.0])
    assert isinstance(mw_to_dbm(1e-3), float) and mw_to_dbm(1e-3) == pytest.approx(-30.0)
    np.testing.assert_allclose(mw_to_dbm(dbm_to_mw(np.array([-30.0, 5.0]))), [-30.0, 5.0])
