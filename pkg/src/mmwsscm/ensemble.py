"""Ensemble generation and secondary-statistic validation."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterator

import numpy as np

from . import analysis
from .channel import ChannelRealization, assemble_spectrum, generate_channel
from .distributions import RngStream
from .params import ModelParams
from .spatial import Side

__all__ = [
    "ACCEPTANCE_BANDS",
    "RealizationStats",
    "EnsembleStats",
    "realization_at",
    "iter_realizations",
    "map_realizations",
    "realization_stats",
    "ensemble_stats",
    "check_acceptance",
    "run_ensemble",
]

# name -> (low, high, reference value)
ACCEPTANCE_BANDS: dict[str, tuple[float, float, float]] = {
    "median_rms_delay_spread_ns": (27.0, 37.0, 32.0),
    "mean_lobe_az_spread_deg": (5.5, 8.5, 7.0),
    "mean_lobe_el_spread_deg": (5.5, 8.5, 7.0),
    "fitted_big_gamma_ns": (34.6, 64.2, 49.4),
    "fitted_gamma_ns": (11.8, 22.0, 16.9),
    "fitted_p0": (0.883 - 0.15, 0.883 + 0.15, 0.883),
    "fitted_pi0": (0.342 - 0.10, 0.342 + 0.10, 0.342),
}


def realization_at(params: ModelParams, seed: int, index: int) -> ChannelRealization:
    """Realization ``index`` of the ensemble seeded with ``seed``."""
    return generate_channel(params, RngStream(seed).substream(index))


def iter_realizations(params: ModelParams, seed: int, size: int,
                      start: int = 0) -> Iterator[ChannelRealization]:
    root = RngStream(seed)
    for i in range(start, start + size):
        yield generate_channel(params, root.substream(i))


def _apply(fn, params, seed, index):
    return fn(realization_at(params, seed, index))


def map_realizations(fn: Callable, params: ModelParams, seed: int, size: int, workers: int = 1) -> list:
    """``[fn(realization_i) for i in range(size)]``, optionally across processes.

    Results are in index order and identical for any worker count, since
    realization ``i`` only depends on ``(seed, i)``.
    """
    if workers <= 1:
        return [fn(r) for r in iter_realizations(params, seed, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(partial(_apply, fn, params, seed), range(size),
                             chunksize=max(1, size // (8 * workers))))


@dataclass
class RealizationStats:
    """Secondary statistics of one channel, plus the points it adds to the decay fits."""

    num_clusters_generated: int
    num_aod_lobes: int
    num_aoa_lobes: int
    rms_delay_spread_ns: float | None
    num_clusters_detected: int
    cluster_delays_ns: np.ndarray
    cluster_fractions: np.ndarray
    subpath_delays_ns: np.ndarray
    subpath_fractions: np.ndarray
    lobe_az_spreads_deg: np.ndarray
    lobe_el_spreads_deg: np.ndarray


def realization_stats(realization: ChannelRealization, floor_dbm: float | None = -100.0,
                      void_ns: float = 25.0, threshold_db: float = -10.0) -> RealizationStats:
    """Statistics the way the measurements were processed.

    With ``floor_dbm`` set, subpaths below it are invisible to every
    statistic (validation mode).
    """
    pdp = analysis.synthesize_pdp(realization, floor_dbm)
    empty = np.zeros(0)
    ds = None
    cd = cf = sd = sf = empty
    n_detected = 0
    if len(pdp):
        ds = analysis.rms_delay_spread(pdp)
        clusters = analysis.partition_clusters(pdp, void_ns)
        n_detected = len(clusters)
        total = pdp.total_power_mw
        t0 = clusters[0].start_ns
        cd = np.array([c.start_ns - t0 for c in clusters])
        cf = np.array([c.power_mw / total for c in clusters])
        sd_parts, sf_parts = [], []
        for c in clusters:
            t = pdp.times_ns[c.first_tap:c.stop_tap]
            p = pdp.powers_mw[c.first_tap:c.stop_tap]
            sd_parts.append(t - t[0])
            sf_parts.append(p / c.power_mw)
        sd, sf = np.concatenate(sd_parts), np.concatenate(sf_parts)

    if floor_dbm is None:
        lobes = realization.aoa_lobes
    else:
        lobes = analysis.floor_pruned_lobes(realization, Side.AOA, floor_dbm)
    az = el = empty
    if lobes:
        spreads = [analysis.rms_lobe_angular_spread(r)
                   for r in analysis.threshold_lobes(assemble_spectrum(lobes), threshold_db)]
        az = np.array([s[0] for s in spreads])
        el = np.array([s[1] for s in spreads])

    return RealizationStats(
        num_clusters_generated=realization.num_clusters,
        num_aod_lobes=len(realization.aod_lobes),
        num_aoa_lobes=len(realization.aoa_lobes),
        rms_delay_spread_ns=ds,
        num_clusters_detected=n_detected,
        cluster_delays_ns=cd,
        cluster_fractions=cf,
        subpath_delays_ns=sd,
        subpath_fractions=sf,
        lobe_az_spreads_deg=az,
        lobe_el_spreads_deg=el,
    )


def _stat(fn, values, *args) -> float:
    # every subpath can fall below the floor, leaving nothing to summarise
    return float(fn(values, *args)) if len(values) else float("nan")


def _histogram(values, lo: int, hi: int) -> dict[str, int]:
    counts = np.bincount(np.asarray(values, dtype=np.int64), minlength=hi + 1)
    return {str(k): int(counts[k]) for k in range(lo, max(hi, len(counts) - 1) + 1)}


@dataclass
class EnsembleStats:
    ensemble_size: int
    rms_delay_spreads_ns: np.ndarray
    rms_lobe_az_spreads_deg: np.ndarray
    rms_lobe_el_spreads_deg: np.ndarray
    cluster_counts: np.ndarray
    detected_cluster_counts: np.ndarray
    lobe_counts_aod: np.ndarray
    lobe_counts_aoa: np.ndarray
    fitted_big_gamma_ns: float
    fitted_p0: float
    fitted_gamma_ns: float
    fitted_pi0: float
    log_fits: dict = field(default_factory=dict)

    @property
    def median_rms_delay_spread_ns(self) -> float:
        return _stat(np.median, self.rms_delay_spreads_ns)

    @property
    def mean_lobe_az_spread_deg(self) -> float:
        return float(np.mean(self.rms_lobe_az_spreads_deg)) if len(self.rms_lobe_az_spreads_deg) else float("nan")

    @property
    def mean_lobe_el_spread_deg(self) -> float:
        return float(np.mean(self.rms_lobe_el_spreads_deg)) if len(self.rms_lobe_el_spreads_deg) else float("nan")

    def summary(self) -> dict:
        """Headline numbers keyed like :data:`ACCEPTANCE_BANDS`."""
        return {
            "median_rms_delay_spread_ns": self.median_rms_delay_spread_ns,
            "mean_lobe_az_spread_deg": self.mean_lobe_az_spread_deg,
            "mean_lobe_el_spread_deg": self.mean_lobe_el_spread_deg,
            "fitted_big_gamma_ns": self.fitted_big_gamma_ns,
            "fitted_gamma_ns": self.fitted_gamma_ns,
            "fitted_p0": self.fitted_p0,
            "fitted_pi0": self.fitted_pi0,
        }

    def report(self) -> dict:
        ds = self.rms_delay_spreads_ns
        return {
            "ensemble_size": self.ensemble_size,
            "summary": self.summary(),
            "rms_delay_spread_ns": {
                "median": _stat(np.median, ds),
                "mean": _stat(np.mean, ds),
                "p10": _stat(np.percentile, ds, 10),
                "p90": _stat(np.percentile, ds, 90),
                "count": int(len(ds)),
            },
            "rms_lobe_spread_deg": {
                "num_lobes": int(len(self.rms_lobe_az_spreads_deg)),
                "azimuth_mean": self.mean_lobe_az_spread_deg,
                "elevation_mean": self.mean_lobe_el_spread_deg,
            },
            "decay_fits": {
                "linear": {
                    "cluster_p0": self.fitted_p0,
                    "cluster_decay_ns": self.fitted_big_gamma_ns,
                    "subpath_p0": self.fitted_pi0,
                    "subpath_decay_ns": self.fitted_gamma_ns,
                },
                "log": dict(self.log_fits),
            },
            "histograms": {
                "clusters_generated": _histogram(self.cluster_counts, 1, 6),
                "clusters_detected": _histogram(self.detected_cluster_counts, 0, 6),
                "aod_lobes": _histogram(self.lobe_counts_aod, 1, 5),
                "aoa_lobes": _histogram(self.lobe_counts_aoa, 1, 5),
            },
        }


def _fit_or_nan(x, y, domain):
    try:
        return analysis.fit_exponential_decay(x, y, domain)
    except ValueError:
        return float("nan"), float("nan")


def ensemble_stats(per_realization: list[RealizationStats]) -> EnsembleStats:
    """Pool per-channel statistics; lobe spreads are pooled one sample per lobe, unweighted."""
    rs = per_realization
    cd = np.concatenate([r.cluster_delays_ns for r in rs]) if rs else np.zeros(0)
    cf = np.concatenate([r.cluster_fractions for r in rs]) if rs else np.zeros(0)
    sd = np.concatenate([r.subpath_delays_ns for r in rs]) if rs else np.zeros(0)
    sf = np.concatenate([r.subpath_fractions for r in rs]) if rs else np.zeros(0)
    p0, big_gamma = _fit_or_nan(cd, cf, "linear")
    pi0, gamma = _fit_or_nan(sd, sf, "linear")
    lp0, lbg = _fit_or_nan(cd, cf, "log")
    lpi0, lg = _fit_or_nan(sd, sf, "log")
    return EnsembleStats(
        ensemble_size=len(rs),
        rms_delay_spreads_ns=np.array([r.rms_delay_spread_ns for r in rs if r.rms_delay_spread_ns is not None]),
        rms_lobe_az_spreads_deg=np.concatenate([r.lobe_az_spreads_deg for r in rs]) if rs else np.zeros(0),
        rms_lobe_el_spreads_deg=np.concatenate([r.lobe_el_spreads_deg for r in rs]) if rs else np.zeros(0),
        cluster_counts=np.array([r.num_clusters_generated for r in rs]),
        detected_cluster_counts=np.array([r.num_clusters_detected for r in rs]),
        lobe_counts_aod=np.array([r.num_aod_lobes for r in rs]),
        lobe_counts_aoa=np.array([r.num_aoa_lobes for r in rs]),
        fitted_big_gamma_ns=big_gamma,
        fitted_p0=p0,
        fitted_gamma_ns=gamma,
        fitted_pi0=pi0,
        log_fits={"cluster_p0": lp0, "cluster_decay_ns": lbg, "subpath_p0": lpi0, "subpath_decay_ns": lg},
    )


def check_acceptance(stats: EnsembleStats) -> dict[str, dict]:
    """Compare each headline statistic with its band."""
    out = {}
    for name, value in stats.summary().items():
        lo, hi, ref = ACCEPTANCE_BANDS[name]
        out[name] = {"value": value, "low": lo, "high": hi, "reference": ref,
                     "passed": bool(lo <= value <= hi)}
    return out


def run_ensemble(params: ModelParams, seed: int, size: int, validation_mode: bool = True,
                 workers: int = 1) -> EnsembleStats:
    """Generate ``size`` channels and pool their statistics."""
    floor = params.temporal.min_subpath_power_dbm if validation_mode else None
    fn = partial(realization_stats, floor_dbm=floor, void_ns=params.temporal.inter_cluster_void_ns)
    return ensemble_stats(map_realizations(fn, params, seed, size, workers))
