import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mmwsscm import RngStream, TemporalParams
from mmwsscm.temporal import (
    TimeCluster,
    absolute_times,
    cluster_delays,
    cluster_powers,
    draw_counts,
    draw_subpath_counts,
    generate_clusters,
    subpath_delays,
    subpath_phases,
    subpath_powers,
)

TP = TemporalParams()


class ScriptedPoisson(RngStream):
    """Stream whose Poisson draws come from a script."""

    def __init__(self, values):
        super().__init__(0)
        self._values = list(values)

    def poisson(self, mean, size=None):
        return self._values.pop(0)


class TestCounts:
    def test_defaults_bounds(self, rng):
        for _ in range(5000):
            n, la, lb = draw_counts(TP, rng)
            assert 1 <= n <= 6
            assert 1 <= la <= min(5, n)
            assert 1 <= lb <= min(5, n)

    def test_single_cluster_forces_single_lobe(self, rng):
        p = TemporalParams(n_max=1)
        for _ in range(500):
            assert draw_counts(p, rng) == (1, 1, 1)

    def test_zero_poisson_draw_clamps_to_one(self):
        _, la, lb = draw_counts(TP, ScriptedPoisson([0, 0]))
        assert (la, lb) == (1, 1)

    def test_large_poisson_draw_clamps_to_l_max(self):
        p = TemporalParams(n_max=6)
        for seed in range(50):
            s = ScriptedPoisson([9, 9])
            s._gen = RngStream(seed).generator
            n, la, lb = draw_counts(p, s, l_max=5)
            assert la == lb == min(5, n)

    def test_subpath_counts(self, rng):
        m = draw_subpath_counts(3, TP, rng)
        assert len(m) == 3 and all(1 <= v <= 30 for v in m)
        assert all(draw_subpath_counts(4, TemporalParams(m_max=1), rng) == 1)

    def test_subpath_count_mean(self):
        m = draw_subpath_counts(10**5, TP, RngStream(4))
        assert abs(m.mean() - 15.5) < 0.1


class TestSubpathDelays:
    def test_x_zero(self):
        np.testing.assert_allclose(subpath_delays(3, TP, x=0.0), [0, 2.5, 5.0])

    def test_single(self, rng):
        assert list(subpath_delays(1, TP, rng)) == [0.0]

    def test_x_upper_bound(self):
        expected = [0.0, math.pow(2.5, 1.43), math.pow(5.0, 1.43)]
        got = subpath_delays(3, TP, x=0.43)
        np.testing.assert_allclose(got, expected, rtol=1e-12)
        np.testing.assert_allclose(got, [0, 3.71, 9.99], atol=0.01)

    @settings(deadline=None)
    @given(m=st.integers(2, 30), seed=st.integers(0, 2**32))
    def test_monotone_with_growing_gaps(self, m, seed):
        rho = subpath_delays(m, TP, RngStream(seed))
        gaps = np.diff(rho)
        assert rho[0] == 0
        assert np.all(gaps > 0)
        assert np.all(np.diff(gaps) >= -1e-12)
        assert gaps[0] >= 2.5 - 1e-12


class TestClusterDelays:
    def test_single(self, rng):
        assert list(cluster_delays(1, [0.0], TP, rng)) == [0.0]

    def test_hand_recursion(self):
        taus = cluster_delays(2, [5.0, 0.0], TP, delta_taus=[0.0, 10.0])
        assert taus[1] == 40.0

    @settings(deadline=None)
    @given(n=st.integers(1, 6), seed=st.integers(0, 2**32))
    def test_void_interval(self, n, seed):
        s = RngStream(seed)
        last = s.uniform(0, 100, size=n)
        taus = cluster_delays(n, last, TP, s)
        assert taus[0] == 0
        gaps = taus[1:] - (taus[:-1] + last[:-1])
        assert np.all(gaps >= 25 - 1e-9)


class TestClusterPowers:
    def test_single_cluster_gets_everything(self, rng):
        assert cluster_powers([123.0], 2.5e-6, TP, rng)[0] == pytest.approx(2.5e-6, rel=1e-15)

    def test_decay_ratio(self):
        p = cluster_powers([0.0, 49.4], 1.0, TP, z_db=[0.0, 0.0])
        assert p[1] / p[0] == pytest.approx(math.exp(-1), rel=1e-12)

    @given(seed=st.integers(0, 2**32), n=st.integers(1, 6))
    def test_sum(self, seed, n):
        s = RngStream(seed)
        taus = np.sort(s.uniform(0, 400, size=n))
        assert cluster_powers(taus, 3e-7, TP, s).sum() == pytest.approx(3e-7, rel=1e-9)


class TestSubpathPowers:
    def test_single(self, rng):
        assert subpath_powers([0.0], 0.7, TP, rng)[0] == pytest.approx(0.7, rel=1e-15)

    def test_decay_ratio(self):
        p = subpath_powers([0.0, 16.9], 1.0, TP, u_db=[0.0, 0.0])
        assert p[1] / p[0] == pytest.approx(math.exp(-1), rel=1e-12)

    @given(seed=st.integers(0, 2**32), m=st.integers(1, 30))
    def test_sum_over_own_subpaths(self, seed, m):
        s = RngStream(seed)
        rho = subpath_delays(m, TP, s)
        assert subpath_powers(rho, 1e-5, TP, s).sum() == pytest.approx(1e-5, rel=1e-9)


class TestPhases:
    def test_full_period(self):
        rho_ns = 1e9 / TP.carrier_hz
        ph = subpath_phases([0.0, rho_ns], TP, phase0=1.0)
        assert ph[1] == pytest.approx(1.0, abs=1e-9)

    def test_half_period(self):
        rho_ns = 0.5e9 / TP.carrier_hz
        ph = subpath_phases([0.0, rho_ns], TP, phase0=1.0)
        assert ph[1] == pytest.approx(1.0 + math.pi, abs=1e-9)

    def test_range(self, rng):
        ph = subpath_phases(subpath_delays(30, TP, rng), TP, rng)
        assert np.all((ph >= 0) & (ph < 2 * math.pi))

    def test_first_phase_uniform(self):
        s = RngStream(8)
        first = np.array([subpath_phases([0.0], TP, s)[0] for _ in range(10**5)])
        assert stats.kstest(first, stats.uniform(0, 2 * math.pi).cdf).pvalue > 0.01


class TestAbsoluteTimes:
    def _cluster(self, tau, rho):
        rho = np.asarray(rho, dtype=float)
        return TimeCluster(1, tau, 1.0, rho, np.ones(len(rho)) / len(rho), np.zeros(len(rho)))

    def test_sixty_metres(self):
        (c,) = absolute_times([self._cluster(0.0, [0.0])], 60 / 0.3)
        assert c.abs_times_ns[0] == pytest.approx(200.0)

    def test_origin(self):
        (c,) = absolute_times([self._cluster(0.0, [0.0])], 0.0)
        assert c.abs_times_ns[0] == 0.0

    def test_second_cluster(self):
        cs = absolute_times([self._cluster(0.0, [0.0]), self._cluster(40.0, [0.0, 2.5])], 200 / 0.3)
        assert cs[1].abs_times_ns[1] == pytest.approx(709.1667, abs=1e-4)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 6))
def test_generated_cluster_invariants(seed, n):
    clusters = generate_clusters(n, 1e-6, 500.0, TP, RngStream(seed))
    assert len(clusters) == n
    total = 0.0
    for k, c in enumerate(clusters):
        assert 1 <= c.num_subpaths <= 30
        assert c.intra_delays_ns[0] == 0
        assert np.all(np.diff(c.intra_delays_ns) > 0)
        assert c.powers_mw.sum() == pytest.approx(c.power_mw, rel=1e-9)
        assert c.abs_times_ns[0] == pytest.approx(500.0 + c.excess_delay_ns)
        if k:
            prev = clusters[k - 1]
            assert c.excess_delay_ns - (prev.excess_delay_ns + prev.last_intra_delay_ns) >= 25 - 1e-9
        total += c.powers_mw.sum()
    assert clusters[0].excess_delay_ns == 0
    assert total == pytest.approx(1e-6, rel=1e-9)


def test_subpath_view_matches_columns(rng):
    (c,) = generate_clusters(1, 1e-6, 0.0, TP, rng)
    sp = c.subpaths
    assert [s.subpath_index for s in sp] == list(range(1, c.num_subpaths + 1))
    assert sp[0].intra_delay_ns == 0


def test_noise_floor_flags(rng):
    clusters = generate_clusters(6, 1e-10, 0.0, TP, rng)  # -100 dBm total
    for c in clusters:
        np.testing.assert_array_equal(c.below_floor, c.powers_mw < 1e-10)
    assert any(c.below_floor.any() for c in clusters)
