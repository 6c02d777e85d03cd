"""One complete channel realization: link, time clusters and spatial lobes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import RngStream
from .link import LinkState, draw_link
from .params import ModelParams
from .spatial import Side, SpatialLobe, assign_subpaths_to_lobes, generate_lobes
from .temporal import TimeCluster, draw_counts, generate_clusters

__all__ = [
    "ChannelRealization",
    "Tap",
    "generate_channel",
    "impulse_response",
    "assemble_spectrum",
    "AZ_BINS",
    "EL_BINS",
]

AZ_BINS = 360
EL_BINS = 181  # -90 .. 90 degrees


@dataclass(frozen=True)
class Tap:
    t_ns: float
    amplitude: float
    phase_rad: float
    aod_az: int
    aod_el: int
    aoa_az: int
    aoa_el: int
    cluster: int
    subpath: int
    aod_lobe: int
    aoa_lobe: int


@dataclass
class ChannelRealization:
    """A generated channel.

    ``aod_lobe_index`` / ``aoa_lobe_index`` are the 1-based lobe of each
    subpath, flattened in (cluster, subpath) order.
    """

    link: LinkState
    clusters: list[TimeCluster]
    aod_lobes: list[SpatialLobe]
    aoa_lobes: list[SpatialLobe]
    aod_lobe_index: np.ndarray
    aoa_lobe_index: np.ndarray

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    @property
    def num_subpaths(self) -> int:
        return sum(c.num_subpaths for c in self.clusters)

    def lobes(self, side) -> list[SpatialLobe]:
        return self.aod_lobes if Side.parse(side) is Side.AOD else self.aoa_lobes

    @property
    def assignment(self) -> dict[tuple[int, int], tuple[int, int]]:
        out = {}
        k = 0
        for c in self.clusters:
            for m in range(c.num_subpaths):
                out[(c.index, m + 1)] = (int(self.aod_lobe_index[k]), int(self.aoa_lobe_index[k]))
                k += 1
        return out

    def subpath_table(self) -> dict[str, np.ndarray]:
        """Column arrays over all subpaths in (cluster, subpath) order."""
        cs = self.clusters
        return {
            "n": np.concatenate([np.full(c.num_subpaths, c.index) for c in cs]),
            "m": np.concatenate([np.arange(1, c.num_subpaths + 1) for c in cs]),
            "t_ns": np.concatenate([c.abs_times_ns for c in cs]),
            "power_mw": np.concatenate([c.powers_mw for c in cs]),
            "phase_rad": np.concatenate([c.phases_rad for c in cs]),
            "below_floor": np.concatenate([c.below_floor for c in cs]),
            "l1": np.asarray(self.aod_lobe_index),
            "l2": np.asarray(self.aoa_lobe_index),
        }


def generate_channel(params: ModelParams, rng: RngStream) -> ChannelRealization:
    """Draw one channel realization from ``rng``."""
    sp = params.spatial
    link = draw_link(params.link, rng)
    n, l_aod, l_aoa = draw_counts(
        params.temporal, rng, mu_aod=sp.mu_aod, mu_aoa=sp.mu_aoa, l_max=sp.l_max,
        aod_offset=sp.aod_poisson_offset, aoa_offset=sp.aoa_poisson_offset,
    )
    clusters = generate_clusters(n, link.omni_rx_power_mw, link.free_space_delay_ns, params.temporal, rng)
    aod_idx, aoa_idx, aod_pw, aoa_pw = assign_subpaths_to_lobes(clusters, l_aod, l_aoa, rng)
    aod_lobes = generate_lobes(Side.AOD, aod_pw, sp, rng)
    aoa_lobes = generate_lobes(Side.AOA, aoa_pw, sp, rng)
    return ChannelRealization(link, clusters, aod_lobes, aoa_lobes, aod_idx, aoa_idx)


def impulse_response(realization: ChannelRealization) -> list[Tap]:
    """One tap per subpath, at its lobes' mean angles, sorted by arrival time."""
    tab = realization.subpath_table()
    aod = {lobe.index: lobe for lobe in realization.aod_lobes}
    aoa = {lobe.index: lobe for lobe in realization.aoa_lobes}
    order = np.argsort(tab["t_ns"], kind="stable")
    taps = []
    for k in order:
        lo, la = aod[int(tab["l1"][k])], aoa[int(tab["l2"][k])]
        taps.append(Tap(
            t_ns=float(tab["t_ns"][k]),
            amplitude=float(np.sqrt(tab["power_mw"][k])),
            phase_rad=float(tab["phase_rad"][k]),
            aod_az=lo.mean_azimuth_deg,
            aod_el=lo.mean_elevation_deg,
            aoa_az=la.mean_azimuth_deg,
            aoa_el=la.mean_elevation_deg,
            cluster=int(tab["n"][k]),
            subpath=int(tab["m"][k]),
            aod_lobe=lo.index,
            aoa_lobe=la.index,
        ))
    return taps


def assemble_spectrum(realization_or_lobes, side=None) -> np.ndarray:
    """Dense ``(360, 181)`` power grid in mW indexed ``[azimuth, elevation + 90]``.

    Accepts a realization plus side, or a list of lobes directly. Segments
    of different lobes landing on the same cell add up.
    """
    if isinstance(realization_or_lobes, ChannelRealization):
        lobes = realization_or_lobes.lobes(side)
    else:
        lobes = realization_or_lobes
    grid = np.zeros((AZ_BINS, EL_BINS))
    for lobe in lobes:
        az, el, p = lobe.segment_arrays()
        np.add.at(grid, (az, el + 90), p)
    return grid
