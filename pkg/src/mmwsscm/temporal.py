"""Time clusters and intra-cluster subpaths.

Covers cluster/lobe counts, subpath counts, intra-cluster delays, cluster
delays with the minimum inter-cluster void, cluster and subpath powers,
subpath phases and absolute arrival times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import RngStream
from .params import TemporalParams

__all__ = [
    "Subpath",
    "TimeCluster",
    "draw_counts",
    "draw_subpath_counts",
    "subpath_delays",
    "cluster_delays",
    "cluster_powers",
    "subpath_powers",
    "subpath_phases",
    "absolute_times",
    "generate_clusters",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Subpath:
    cluster_index: int
    subpath_index: int
    intra_delay_ns: float
    power_mw: float
    phase_rad: float
    abs_time_ns: float
    below_floor: bool = False


@dataclass
class TimeCluster:
    """One time cluster; subpath quantities are stored column-wise.

    Index ``m`` of every array is subpath ``m + 1`` of the cluster.
    """

    index: int
    excess_delay_ns: float
    power_mw: float
    intra_delays_ns: np.ndarray
    powers_mw: np.ndarray
    phases_rad: np.ndarray
    abs_times_ns: np.ndarray = field(default=None)
    below_floor: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.abs_times_ns is None:
            self.abs_times_ns = np.full(len(self.intra_delays_ns), np.nan)
        if self.below_floor is None:
            self.below_floor = np.zeros(len(self.intra_delays_ns), dtype=bool)

    @property
    def num_subpaths(self) -> int:
        return len(self.intra_delays_ns)

    @property
    def subpaths(self) -> list[Subpath]:
        return [
            Subpath(self.index, m + 1, float(self.intra_delays_ns[m]), float(self.powers_mw[m]),
                    float(self.phases_rad[m]), float(self.abs_times_ns[m]), bool(self.below_floor[m]))
            for m in range(self.num_subpaths)
        ]

    @property
    def last_intra_delay_ns(self) -> float:
        return float(self.intra_delays_ns[-1])


def draw_counts(
    params: TemporalParams,
    rng: RngStream,
    mu_aod: float = 1.6,
    mu_aoa: float = 1.7,
    l_max: int = 5,
    aod_offset: float = 0.2,
    aoa_offset: float = 0.1,
) -> tuple[int, int, int]:
    """Number of time clusters and of AOD / AOA spatial lobes.

    Lobe counts never exceed the cluster count: a lobe needs at least one
    cluster arriving through it.
    """
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    n = rng.discrete_uniform(1, params.n_max)
    a = rng.poisson(mu_aod + aod_offset)
    b = rng.poisson(mu_aoa + aoa_offset)
    l_aod = min(l_max, max(1, min(a, n)))
    l_aoa = min(l_max, max(1, min(b, n)))
    return n, l_aod, l_aoa


def draw_subpath_counts(n: int, params: TemporalParams, rng: RngStream) -> np.ndarray:
    if n < 1:
        raise ValueError(f"need at least one cluster, got {n}")
    return rng.discrete_uniform(1, params.m_max, size=n)


def subpath_delays(m_count: int, params: TemporalParams, rng: RngStream | None = None,
                   x: float | None = None) -> np.ndarray:
    """Intra-cluster excess delays in ns, ``(T_bb * (m - 1)) ** (1 + X)``.

    ``T_bb`` is the baseband chip period in ns (2.5 ns at 400 MHz). One
    ``X ~ U(0, x_max)`` is drawn per cluster unless given, so gaps between
    consecutive subpaths never shrink with delay.
    """
    if m_count < 1:
        raise ValueError(f"need at least one subpath, got {m_count}")
    if x is None:
        x = rng.uniform(0.0, params.x_max)
    base = params.min_subpath_interval_ns * np.arange(m_count, dtype=float)
    return base ** (1.0 + x)


def cluster_delays(n: int, last_subpath_delays, params: TemporalParams, rng: RngStream | None = None,
                   delta_taus=None) -> np.ndarray:
    """Cluster excess delays in ns.

    Each cluster starts after the previous one's last subpath plus a sorted
    exponential offset and the inter-cluster void, so clusters never overlap.
    """
    last = np.asarray(last_subpath_delays, dtype=float)
    if n < 1 or len(last) != n:
        raise ValueError("last_subpath_delays must hold one entry per cluster")
    if delta_taus is None:
        raw = rng.exponential(params.mu_tau_ns, size=n)
        delta_taus = np.sort(raw, kind="stable") - raw.min()
    delta_taus = np.asarray(delta_taus, dtype=float)
    taus = np.zeros(n)
    for k in range(1, n):
        taus[k] = taus[k - 1] + last[k - 1] + delta_taus[k] + params.inter_cluster_void_ns
    return taus


def cluster_powers(taus, pr_mw: float, params: TemporalParams, rng: RngStream | None = None,
                   z_db=None) -> np.ndarray:
    """Cluster powers in mW, exponentially decaying with lognormal spread, summing to ``pr_mw``."""
    if not pr_mw > 0:
        raise ValueError(f"received power must be positive, got {pr_mw} mW")
    taus = np.asarray(taus, dtype=float)
    if z_db is None:
        z_db = rng.normal(0.0, params.cluster_shadow_sigma_db, size=len(taus))
    raw = params.cluster_p0 * np.exp(-taus / params.cluster_decay_ns) * 10.0 ** (np.asarray(z_db) / 10.0)
    return raw / raw.sum() * pr_mw


def subpath_powers(rhos, pn_mw: float, params: TemporalParams, rng: RngStream | None = None,
                   u_db=None) -> np.ndarray:
    """Subpath powers in mW, normalised over the cluster's own subpaths to ``pn_mw``."""
    if not pn_mw > 0:
        raise ValueError(f"cluster power must be positive, got {pn_mw} mW")
    rhos = np.asarray(rhos, dtype=float)
    if u_db is None:
        u_db = rng.normal(0.0, params.subpath_shadow_sigma_db, size=len(rhos))
    raw = params.subpath_p0 * np.exp(-rhos / params.subpath_decay_ns) * 10.0 ** (np.asarray(u_db) / 10.0)
    return raw / raw.sum() * pn_mw


def subpath_phases(rhos, params: TemporalParams, rng: RngStream | None = None,
                   phase0: float | None = None) -> np.ndarray:
    """Subpath phases in rad on ``[0, 2*pi)``; delays are given in ns."""
    if phase0 is None:
        phase0 = rng.uniform(0.0, TWO_PI)
    rhos_s = np.asarray(rhos, dtype=float) * 1e-9
    phases = np.mod(phase0 + TWO_PI * params.carrier_hz * rhos_s, TWO_PI)
    # mod can return exactly 2*pi for inputs a hair below it
    phases[phases >= TWO_PI] = 0.0
    return phases


def absolute_times(clusters: list[TimeCluster], t0_ns: float) -> list[TimeCluster]:
    if t0_ns < 0:
        raise ValueError(f"t0 must be non-negative, got {t0_ns}")
    for c in clusters:
        c.abs_times_ns = t0_ns + c.excess_delay_ns + c.intra_delays_ns
    return clusters


def generate_clusters(n: int, pr_mw: float, t0_ns: float, params: TemporalParams,
                      rng: RngStream) -> list[TimeCluster]:
    """Full temporal skeleton of one channel given the cluster count."""
    counts = draw_subpath_counts(n, params, rng)
    rhos = [subpath_delays(int(m), params, rng) for m in counts]
    taus = cluster_delays(n, [r[-1] for r in rhos], params, rng)
    p_n = cluster_powers(taus, pr_mw, params, rng)
    floor_mw = 10.0 ** (params.min_subpath_power_dbm / 10.0)
    clusters = []
    for k in range(n):
        powers = subpath_powers(rhos[k], p_n[k], params, rng)
        phases = subpath_phases(rhos[k], params, rng)
        clusters.append(
            TimeCluster(
                index=k + 1,
                excess_delay_ns=float(taus[k]),
                power_mw=float(p_n[k]),
                intra_delays_ns=rhos[k],
                powers_mw=powers,
                phases_rad=phases,
                below_floor=powers < floor_mw,
            )
        )
    return absolute_times(clusters, t0_ns)
