import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmwsscm import RngStream, SpatialParams
from mmwsscm.spatial import (
    Side,
    SpatialLobe,
    assign_subpaths_to_lobes,
    azimuth_overlap,
    discretize_lobe,
    draw_segment_sigmas,
    generate_lobes,
    lobe_mean_azimuths,
    lobe_mean_elevations,
    lobe_offsets,
    lobe_spreads,
    segment_profile,
)
from mmwsscm.temporal import TimeCluster

SP = SpatialParams()


def in_sector(theta, i, num):
    lo, hi = 360 * (i - 1) / num, 360 * i / num
    return lo <= theta <= hi or (theta == 0 and hi == 360)


class ScriptedIndices(RngStream):
    def __init__(self, *arrays):
        super().__init__(0)
        self._arrays = [np.asarray(a) for a in arrays]

    def discrete_uniform(self, lo, hi, size=None):
        return self._arrays.pop(0)


class TestMeanAngles:
    def test_single_lobe(self, rng):
        for _ in range(200):
            assert 0 <= lobe_mean_azimuths(1, rng)[0] < 360

    def test_sector_bounds_l4(self, rng):
        for _ in range(500):
            assert 180 <= lobe_mean_azimuths(4, rng)[2] <= 270

    @given(num=st.integers(1, 5), seed=st.integers(0, 2**32))
    def test_every_lobe_in_its_sector(self, num, seed):
        az = lobe_mean_azimuths(num, RngStream(seed))
        assert len(az) == num
        for i, theta in enumerate(az, start=1):
            assert in_sector(theta, i, num)

    def test_zero_variance_elevation(self, rng):
        p = SpatialParams(aod_elev_std_deg=0.0)
        assert list(lobe_mean_elevations(3, "AOD", p, rng)) == [-5, -5, -5]

    @pytest.mark.parametrize("side,mean", [(Side.AOA, 3.6), (Side.AOD, -4.9)])
    def test_elevation_ensemble_mean(self, side, mean):
        el = lobe_mean_elevations(10**5, side, SP, RngStream(5))
        assert el.dtype.kind == "i"
        assert abs(el.mean() - mean) < 0.1


class TestAssignment:
    def _clusters(self, powers):
        return [TimeCluster(1, 0.0, sum(powers), np.arange(len(powers), dtype=float),
                            np.array(powers), np.zeros(len(powers)))]

    def test_single_lobe(self, rng):
        clusters = self._clusters([0.2, 0.3, 0.5])
        _, _, aod, aoa = assign_subpaths_to_lobes(clusters, 1, 1, rng)
        assert aod == pytest.approx([1.0]) and aoa == pytest.approx([1.0])

    def test_hand_kronecker_sum(self):
        clusters = self._clusters([0.7, 0.3])
        s = ScriptedIndices([2, 1], [1, 2])
        aod_idx, aoa_idx, aod, aoa = assign_subpaths_to_lobes(clusters, 2, 2, s)
        assert list(aod) == pytest.approx([0.3, 0.7])
        assert list(aoa) == pytest.approx([0.7, 0.3])

    @given(seed=st.integers(0, 2**32), la=st.integers(1, 5), lb=st.integers(1, 5))
    def test_partition(self, seed, la, lb):
        s = RngStream(seed)
        powers = s.uniform(0, 1, size=40)
        clusters = self._clusters(list(powers))
        ia, ib, aod, aoa = assign_subpaths_to_lobes(clusters, la, lb, s)
        assert ia.min() >= 1 and ia.max() <= la
        assert aod.sum() == pytest.approx(powers.sum(), rel=1e-12)
        assert aoa.sum() == pytest.approx(powers.sum(), rel=1e-12)


class TestSpreads:
    def test_aod_elevation_fixed(self, rng):
        _, h = lobe_spreads(5, "AOD", SP, rng)
        assert list(h) == [10] * 5

    def test_aod_floor(self, rng):
        p = SpatialParams(aod_az_spread_mean_deg=2.0, aod_az_spread_std_deg=0.0)
        k, _ = lobe_spreads(3, "AOD", p, rng)
        assert list(k) == [5, 5, 5]

    def test_aoa_elevation_floor(self, rng):
        p = SpatialParams(aoa_elev_spread_mean_deg=1.0, aoa_elev_spread_std_deg=0.0)
        _, h = lobe_spreads(2, "AOA", p, rng)
        assert list(h) == [5, 5]

    def test_aoa_azimuth_dln_mean(self):
        s = RngStream(6)
        k = np.concatenate([lobe_spreads(1, "AOA", SP, s)[0] for _ in range(10**5)])
        assert abs(k.mean() - 32) < 1

    def test_overlap_geometry(self):
        assert azimuth_overlap(0, 20, 30, 20) == 0
        assert azimuth_overlap(0, 40, 30, 40) == 10
        assert azimuth_overlap(350, 20, 5, 20) == 5  # across the seam

    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2**32), num=st.integers(2, 5), side=st.sampled_from(["AOD", "AOA"]))
    def test_adjacent_overlap_bounded(self, seed, num, side):
        s = RngStream(seed)
        az = lobe_mean_azimuths(num, s)
        k, _ = lobe_spreads(num, side, SP, s, mean_azimuths=az)
        floor = SP.aod_az_spread_floor_deg if side == "AOD" else 1
        for i in range(num):
            j = (i + 1) % num
            ov = azimuth_overlap(az[i], k[i], az[j], k[j])
            # the clamp stops at the floor; only then can the bound be exceeded
            if k[i] > floor and k[j] > floor:
                assert ov <= 0.1 * min(k[i], k[j]) + 1e-12


class TestDiscretize:
    def test_odd(self):
        assert list(lobe_offsets(3, 0)) == [-1, 0, 1]
        assert list(lobe_offsets(3, 1)) == [-1, 0, 1]

    def test_even_x1(self):
        assert list(lobe_offsets(4, 1)) == [-2, -1, 0, 1]

    def test_even_x0(self):
        assert list(lobe_offsets(4, 0)) == [-1, 0, 1, 2]

    def test_minimal(self, rng):
        az, el = discretize_lobe(1, 1, rng)
        assert list(az) == [0] and list(el) == [0]

    @given(k=st.integers(1, 120), x=st.integers(0, 1))
    def test_count_and_contiguity(self, k, x):
        off = lobe_offsets(k, x)
        assert len(off) == k
        assert np.all(np.diff(off) == 1)
        assert 0 in off


class TestSegmentProfile:
    def test_peak(self):
        assert segment_profile(0, 0, 6.0, 6.0) == 1.0

    def test_one_sigma(self):
        assert segment_profile(6.0, 0, 6.0, 3.0) == pytest.approx(math.exp(-0.5))

    def test_floor(self):
        assert segment_profile(100.0, 0, 6.0, 6.0) == 0.1

    def test_sigma_draws_positive(self):
        s = RngStream(2)
        p = SpatialParams(aoa_sigma_phi_mean_deg=0.0, aoa_sigma_phi_std_deg=1.0)
        for _ in range(500):
            st_, sp_ = draw_segment_sigmas("AOA", p, s)
            assert st_ >= 0.5 and sp_ >= 0.5

    def test_aod_sigma_phi_fixed(self, rng):
        assert draw_segment_sigmas("AOD", SP, rng)[1] == 5.0


def _lobe(**kw):
    base = dict(side=Side.AOA, index=1, mean_azimuth_deg=100, mean_elevation_deg=0, azimuth_spread_deg=1,
                elevation_spread_deg=1, total_power_mw=2.0, sigma_theta_deg=6.0, sigma_phi_deg=6.0,
                az_offset_start=0, el_offset_start=0)
    base.update(kw)
    return SpatialLobe(**base)


class TestLobeSegments:
    def test_minimal_lobe(self):
        (seg,) = _lobe().segments
        assert (seg.azimuth_deg, seg.elevation_deg, seg.power_mw) == (100, 0, 2.0)

    def test_centre_carries_lobe_power(self):
        lobe = _lobe(azimuth_spread_deg=5, elevation_spread_deg=3, az_offset_start=-2, el_offset_start=-1)
        az, el, p = lobe.segment_arrays()
        assert len(p) == 15
        assert p[(az == 100) & (el == 0)][0] == 2.0
        assert np.all(p >= 0.1 * p.max())

    def test_azimuth_wrap(self):
        lobe = _lobe(mean_azimuth_deg=1, azimuth_spread_deg=5, az_offset_start=-2)
        az, _, _ = lobe.segment_arrays()
        assert sorted(az) == [0, 1, 2, 3, 359]

    def test_elevation_clipped(self):
        lobe = _lobe(mean_elevation_deg=89, elevation_spread_deg=5, el_offset_start=-2)
        _, el, _ = lobe.segment_arrays()
        assert sorted(el) == [87, 88, 89, 90]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), num=st.integers(1, 5), side=st.sampled_from(["AOD", "AOA"]))
def test_generated_lobes(seed, num, side):
    s = RngStream(seed)
    powers = s.uniform(0.1, 1.0, size=num)
    lobes = generate_lobes(side, powers, SP, s)
    assert [lobe.index for lobe in lobes] == list(range(1, num + 1))
    for i, lobe in enumerate(lobes, start=1):
        assert in_sector(lobe.mean_azimuth_deg, i, num)
        assert lobe.total_power_mw == powers[i - 1]
        if side == "AOD":
            assert lobe.azimuth_spread_deg >= 5 and lobe.elevation_spread_deg == 10
        _, _, p = lobe.segment_arrays()
        assert np.all(p >= SP.segment_floor * p.max() * (1 - 1e-12))
