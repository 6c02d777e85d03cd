"""AOD / AOA spatial lobes and their 1-degree segment power profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distributions import RngStream, round_half_up
from .params import SpatialParams
from .temporal import TimeCluster

__all__ = [
    "Side",
    "SpatialLobe",
    "LobeSegment",
    "lobe_mean_azimuths",
    "lobe_mean_elevations",
    "assign_subpaths_to_lobes",
    "lobe_spreads",
    "azimuth_overlap",
    "discretize_lobe",
    "lobe_offsets",
    "draw_segment_sigmas",
    "segment_profile",
    "segment_powers",
    "generate_lobes",
]

MAX_REDRAWS = 100


class Side(str, Enum):
    AOD = "AOD"
    AOA = "AOA"

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, Side):
            return value
        return cls(str(value).upper())


@dataclass(frozen=True)
class LobeSegment:
    azimuth_deg: int
    elevation_deg: int
    power_mw: float


@dataclass
class SpatialLobe:
    """A spatial lobe and its discretisation.

    The segment grid is fully determined by the spreads and the first
    azimuth / elevation offsets, which is all that needs storing.
    Segment powers carry ``R * total_power_mw``; they shape the lobe and do
    not partition its power.
    """

    side: Side
    index: int
    mean_azimuth_deg: int
    mean_elevation_deg: int
    azimuth_spread_deg: int
    elevation_spread_deg: int
    total_power_mw: float
    sigma_theta_deg: float
    sigma_phi_deg: float
    az_offset_start: int
    el_offset_start: int
    segment_floor: float = 0.1

    @property
    def az_offsets(self) -> np.ndarray:
        return self.az_offset_start + np.arange(self.azimuth_spread_deg)

    @property
    def el_offsets(self) -> np.ndarray:
        return self.el_offset_start + np.arange(self.elevation_spread_deg)

    def segment_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat ``(azimuths, elevations, powers)`` of all in-range segments."""
        dth, dph = np.meshgrid(self.az_offsets, self.el_offsets, indexing="ij")
        r = segment_profile(dth, dph, self.sigma_theta_deg, self.sigma_phi_deg, self.segment_floor)
        az = np.mod(self.mean_azimuth_deg + dth, 360)
        el = self.mean_elevation_deg + dph
        keep = (el >= -90) & (el <= 90)
        return az[keep].astype(np.int64), el[keep].astype(np.int64), (r * self.total_power_mw)[keep]

    @property
    def segments(self) -> list[LobeSegment]:
        az, el, p = self.segment_arrays()
        return [LobeSegment(int(a), int(e), float(q)) for a, e, q in zip(az, el, p)]


def lobe_mean_azimuths(num_lobes: int, rng: RngStream) -> np.ndarray:
    """Mean azimuths in degrees, one per equal azimuth sector so lobes cannot collide."""
    if num_lobes < 1:
        raise ValueError(f"need at least one lobe, got {num_lobes}")
    out = np.empty(num_lobes, dtype=np.int64)
    for i in range(1, num_lobes + 1):
        lo = math.ceil(360 * (i - 1) / num_lobes)
        hi = math.floor(360 * i / num_lobes)
        out[i - 1] = rng.discrete_uniform(lo, hi)
    return np.mod(out, 360)


def lobe_mean_elevations(num_lobes: int, side, params: SpatialParams, rng: RngStream) -> np.ndarray:
    """Rounded normal mean elevations in degrees (positive above the horizon)."""
    if num_lobes < 1:
        raise ValueError(f"need at least one lobe, got {num_lobes}")
    if Side.parse(side) is Side.AOD:
        mu, sigma = params.aod_elev_mean_deg, params.aod_elev_std_deg
    else:
        mu, sigma = params.aoa_elev_mean_deg, params.aoa_elev_std_deg
    draws = rng.normal(mu, sigma, size=num_lobes)
    return np.clip(round_half_up(draws), -90, 90)


def assign_subpaths_to_lobes(clusters: list[TimeCluster], l_aod: int, l_aoa: int, rng: RngStream):
    """Randomly route every subpath through one AOD lobe and one AOA lobe.

    Returns
    -------
    aod_index, aoa_index : ndarray of int
        1-based lobe index per subpath, flattened in (cluster, subpath) order.
    aod_powers, aoa_powers : ndarray
        Total power in mW collected by each lobe.
    """
    powers = np.concatenate([c.powers_mw for c in clusters])
    total = len(powers)
    aod_index = rng.discrete_uniform(1, l_aod, size=total)
    aoa_index = rng.discrete_uniform(1, l_aoa, size=total)
    aod_powers = np.bincount(aod_index - 1, weights=powers, minlength=l_aod)
    aoa_powers = np.bincount(aoa_index - 1, weights=powers, minlength=l_aoa)
    return aod_index, aoa_index, aod_powers, aoa_powers


def azimuth_overlap(theta_a: float, k_a: int, theta_b: float, k_b: int) -> float:
    """Overlap in degrees of two lobe azimuth extents, lobe ``b`` lying counter-clockwise of ``a``."""
    gap = (theta_b - theta_a) % 360
    return max(0.0, (k_a + k_b) / 2.0 - gap)


def _violates(k: int, i: int, means, spreads, frac: float) -> bool:
    """Does lobe ``i`` with spread ``k`` overlap its already-drawn circular neighbours too much?"""
    num = len(means)
    neighbours = []
    if i >= 1:
        neighbours.append((i - 1, i))
    if i == num - 1 and num >= 2:
        neighbours.append((i, 0))
    for a, b in neighbours:
        ka = k if a == i else spreads[a]
        kb = k if b == i else spreads[b]
        if azimuth_overlap(means[a], ka, means[b], kb) > frac * min(ka, kb):
            return True
    return False


def lobe_spreads(num_lobes: int, side, params: SpatialParams, rng: RngStream,
                 mean_azimuths=None) -> tuple[np.ndarray, np.ndarray]:
    """Azimuth and elevation spreads ``(K, H)`` in integer degrees.

    When mean azimuths are given, a spread that overlaps an adjacent lobe
    by more than ``max_lobe_overlap`` of the narrower extent is redrawn, and
    after ``MAX_REDRAWS`` failures shrunk until it fits (never below its floor).
    """
    side = Side.parse(side)
    if side is Side.AOD:
        floor = params.aod_az_spread_floor_deg

        def draw_k():
            return max(floor, round_half_up(rng.normal(params.aod_az_spread_mean_deg,
                                                       params.aod_az_spread_std_deg)))
    else:
        floor = 1

        def draw_k():
            return rng.discrete_lognormal(params.aoa_az_spread_dln_mean_deg,
                                          params.aoa_az_spread_dln_std_deg)

    ks = np.zeros(num_lobes, dtype=np.int64)
    for i in range(num_lobes):
        k = min(draw_k(), 360)
        if mean_azimuths is not None and num_lobes > 1:
            tries = 0
            while _violates(k, i, mean_azimuths, ks, params.max_lobe_overlap) and tries < MAX_REDRAWS:
                k = min(draw_k(), 360)
                tries += 1
            while k > floor and _violates(k, i, mean_azimuths, ks, params.max_lobe_overlap):
                k -= 1
        ks[i] = k

    if side is Side.AOD:
        hs = np.full(num_lobes, params.aod_elev_spread_deg, dtype=np.int64)
    else:
        draws = rng.normal(params.aoa_elev_spread_mean_deg, params.aoa_elev_spread_std_deg, size=num_lobes)
        hs = np.clip(round_half_up(draws), params.aoa_elev_spread_floor_deg, 181)
    return ks, hs


def lobe_offsets(spread: int, asym: int) -> np.ndarray:
    """Integer 1-degree offsets about the lobe centre.

    Odd spreads are symmetric. Even spreads run from ``-spread/2 + (1 - asym)``
    to ``spread/2 - asym``, i.e. the extra segment sits on the low side when
    ``asym`` is 1 and on the high side when it is 0.
    """
    if spread < 1:
        raise ValueError(f"spread must be >= 1 degree, got {spread}")
    if spread % 2:
        half = (spread - 1) // 2
        return np.arange(-half, half + 1)
    return np.arange(-spread // 2 + (1 - asym), spread // 2 - asym + 1)


def discretize_lobe(k: int, h: int, rng: RngStream | None = None, x: int | None = None,
                    w: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Azimuth and elevation segment offsets of a ``k`` x ``h`` lobe."""
    if x is None:
        x = rng.discrete_uniform(0, 1)
    if w is None:
        w = rng.discrete_uniform(0, 1)
    return lobe_offsets(k, x), lobe_offsets(h, w)


def _positive_normal(mu: float, sigma: float, floor: float, rng: RngStream) -> float:
    for _ in range(MAX_REDRAWS):
        v = float(rng.normal(mu, sigma))
        if v >= floor:
            return v
    return floor


def draw_segment_sigmas(side, params: SpatialParams, rng: RngStream) -> tuple[float, float]:
    """Gaussian shaping widths ``(sigma_theta, sigma_phi)`` in degrees for one lobe."""
    p = params
    if Side.parse(side) is Side.AOD:
        st = (p.aod_sigma_theta_mean_deg, p.aod_sigma_theta_std_deg)
        sp = (p.aod_sigma_phi_mean_deg, p.aod_sigma_phi_std_deg)
    else:
        st = (p.aoa_sigma_theta_mean_deg, p.aoa_sigma_theta_std_deg)
        sp = (p.aoa_sigma_phi_mean_deg, p.aoa_sigma_phi_std_deg)
    return (_positive_normal(*st, p.sigma_floor_deg, rng),
            _positive_normal(*sp, p.sigma_floor_deg, rng))


def segment_profile(d_theta, d_phi, sigma_theta: float, sigma_phi: float, floor: float = 0.1):
    """Relative segment power: 2-D Gaussian in the offsets, floored at ``floor``."""
    d_theta = np.asarray(d_theta, dtype=float)
    d_phi = np.asarray(d_phi, dtype=float)
    g = np.exp(-0.5 * (d_theta**2 / sigma_theta**2 + d_phi**2 / sigma_phi**2))
    return np.maximum(g, floor)


def segment_powers(lobe: SpatialLobe) -> list[LobeSegment]:
    return lobe.segments


def generate_lobes(side, lobe_powers, params: SpatialParams, rng: RngStream) -> list[SpatialLobe]:
    """Mean angles, spreads, discretisation and shaping for every lobe of one side."""
    side = Side.parse(side)
    num = len(lobe_powers)
    az = lobe_mean_azimuths(num, rng)
    el = lobe_mean_elevations(num, side, params, rng)
    ks, hs = lobe_spreads(num, side, params, rng, mean_azimuths=az)
    lobes = []
    for i in range(num):
        th_off, ph_off = discretize_lobe(int(ks[i]), int(hs[i]), rng)
        s_theta, s_phi = draw_segment_sigmas(side, params, rng)
        lobes.append(
            SpatialLobe(
                side=side,
                index=i + 1,
                mean_azimuth_deg=int(az[i]),
                mean_elevation_deg=int(el[i]),
                azimuth_spread_deg=int(ks[i]),
                elevation_spread_deg=int(hs[i]),
                total_power_mw=float(lobe_powers[i]),
                sigma_theta_deg=s_theta,
                sigma_phi_deg=s_phi,
                az_offset_start=int(th_off[0]),
                el_offset_start=int(ph_off[0]),
                segment_floor=params.segment_floor,
            )
        )
    return lobes
