"""Measurement-side processing applied to generated channels.

Omnidirectional PDPs, RMS delay spread, time-cluster partitioning with a
minimum void interval, exponential decay fits, and -10 dB lobe
thresholding of angular power spectra with per-lobe RMS angular spreads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage, optimize

from .channel import EL_BINS, ChannelRealization
from .link import dbm_to_mw
from .spatial import Side

__all__ = [
    "PowerDelayProfile",
    "ClusterExtent",
    "LobeRegion",
    "synthesize_pdp",
    "rms_delay_spread",
    "partition_clusters",
    "fit_exponential_decay",
    "threshold_lobes",
    "rms_lobe_angular_spread",
    "floor_pruned_lobes",
]

# Relative slack on the lobe threshold so that segments sitting exactly on
# the -10 dB shaping floor are not lost to rounding.
THRESHOLD_RTOL = 1e-9


@dataclass(frozen=True)
class PowerDelayProfile:
    times_ns: np.ndarray
    powers_mw: np.ndarray
    origin: str = "absolute"

    def __post_init__(self):
        if len(self.times_ns) != len(self.powers_mw):
            raise ValueError("times and powers must have equal length")

    def __len__(self) -> int:
        return len(self.times_ns)

    @property
    def total_power_mw(self) -> float:
        return float(np.sum(self.powers_mw))

    def to_excess(self) -> "PowerDelayProfile":
        if len(self) == 0:
            return replace(self, origin="excess")
        return PowerDelayProfile(self.times_ns - self.times_ns[0], self.powers_mw, "excess")


@dataclass(frozen=True)
class ClusterExtent:
    start_ns: float
    end_ns: float
    power_mw: float
    first_tap: int
    stop_tap: int  # exclusive

    @property
    def num_taps(self) -> int:
        return self.stop_tap - self.first_tap


@dataclass(frozen=True)
class LobeRegion:
    """Cells of one thresholded lobe: azimuth / elevation in degrees, power in mW."""

    azimuths_deg: np.ndarray
    elevations_deg: np.ndarray
    powers_mw: np.ndarray

    @property
    def num_cells(self) -> int:
        return len(self.powers_mw)

    @property
    def total_power_mw(self) -> float:
        return float(self.powers_mw.sum())


def synthesize_pdp(realization: ChannelRealization, floor_dbm: float | None = None) -> PowerDelayProfile:
    """Omnidirectional PDP on absolute time; taps at identical times are merged.

    Subpaths weaker than ``floor_dbm`` are dropped when it is given.
    """
    t = np.concatenate([c.abs_times_ns for c in realization.clusters])
    p = np.concatenate([c.powers_mw for c in realization.clusters])
    if floor_dbm is not None:
        keep = p >= dbm_to_mw(floor_dbm)
        t, p = t[keep], p[keep]
    times, inverse = np.unique(t, return_inverse=True)
    powers = np.bincount(inverse, weights=p, minlength=len(times))
    return PowerDelayProfile(times, powers, "absolute")


def rms_delay_spread(pdp: PowerDelayProfile) -> float:
    """Power-weighted RMS delay spread in ns."""
    if len(pdp) == 0:
        raise ValueError("empty power delay profile")
    t = pdp.times_ns - pdp.times_ns[0]
    w = pdp.powers_mw / pdp.powers_mw.sum()
    mean = np.dot(w, t)
    return float(np.sqrt(max(np.dot(w, (t - mean) ** 2), 0.0)))


def partition_clusters(pdp: PowerDelayProfile, void_ns: float = 25.0) -> list[ClusterExtent]:
    """Split a PDP into time clusters wherever consecutive taps are ``void_ns`` or more apart."""
    if len(pdp) == 0:
        raise ValueError("empty power delay profile")
    breaks = np.flatnonzero(np.diff(pdp.times_ns) >= void_ns) + 1
    bounds = np.concatenate([[0], breaks, [len(pdp)]])
    return [
        ClusterExtent(
            start_ns=float(pdp.times_ns[a]),
            end_ns=float(pdp.times_ns[b - 1]),
            power_mw=float(pdp.powers_mw[a:b].sum()),
            first_tap=int(a),
            stop_tap=int(b),
        )
        for a, b in zip(bounds[:-1], bounds[1:])
    ]


def fit_exponential_decay(delays_ns, powers, domain: str = "linear") -> tuple[float, float]:
    """Least-squares fit of ``power = p0 * exp(-delay / decay)``.

    Parameters
    ----------
    delays_ns, powers : array_like
        Excess delays and normalised powers in (0, 1].
    domain : {"linear", "log"}
        ``"log"`` regresses ``ln(power)`` on delay. ``"linear"`` minimises
        squared error on the powers themselves, starting from the log fit;
        this is the regression the published decay constants come from.

    Returns
    -------
    p0 : float
        Intercept at zero delay.
    decay_ns : float
        Decay constant; ``inf`` if the fitted slope is not negative.
    """
    x = np.asarray(delays_ns, dtype=float)
    y = np.asarray(powers, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need at least two (delay, power) points")
    if np.any(y <= 0):
        raise ValueError("powers must be positive for an exponential fit")
    if domain not in ("linear", "log"):
        raise ValueError(f"unknown fit domain {domain!r}")
    a = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(a, np.log(y), rcond=None)
    p0, rate = float(np.exp(intercept)), float(-slope)
    if domain == "linear" and rate > 0:
        def resid(theta):
            return theta[0] * np.exp(-theta[1] * x) - y

        def jac(theta):
            e = np.exp(-theta[1] * x)
            return np.column_stack([e, -theta[0] * x * e])

        sol = optimize.least_squares(resid, [p0, rate], jac=jac, x_scale="jac",
                                     xtol=1e-15, ftol=1e-15, gtol=1e-15)
        p0, rate = float(sol.x[0]), float(sol.x[1])
    decay = 1.0 / rate if rate > 0 else np.inf
    return p0, float(decay)


def threshold_lobes(spectrum: np.ndarray, threshold_db: float = -10.0) -> list[LobeRegion]:
    """Contiguous regions of a ``(360, 181)`` spectrum within ``threshold_db`` of its peak.

    Cells are edge-connected; azimuth wraps between 359 and 0 degrees.
    Regions come back sorted by decreasing power.
    """
    spectrum = np.asarray(spectrum, dtype=float)
    peak = spectrum.max()
    if not peak > 0:
        raise ValueError("spectrum has no positive power")
    level = peak * 10.0 ** (threshold_db / 10.0) * (1.0 - THRESHOLD_RTOL)
    mask = spectrum >= level
    labels, count = ndimage.label(mask)

    # merge components touching across the azimuth seam
    parent = list(range(count + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in zip(labels[0], labels[-1]):
        if a and b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(count + 1)])
    labels = roots[labels]

    regions = []
    for lab in np.unique(labels[labels > 0]):
        az, el = np.nonzero(labels == lab)
        regions.append(LobeRegion(az, el - (EL_BINS - 1) // 2, spectrum[az, el]))
    regions.sort(key=lambda r: -r.total_power_mw)
    return regions


def _wrap180(x):
    return (np.asarray(x, dtype=float) + 180.0) % 360.0 - 180.0


def rms_lobe_angular_spread(region: LobeRegion) -> tuple[float, float]:
    """Power-weighted RMS azimuth and elevation spreads of one lobe, in degrees.

    Azimuth deviations are taken from the circular mean and wrapped to
    (-180, 180], so lobes straddling 0 degrees are handled.
    """
    w = region.powers_mw / region.powers_mw.sum()
    rad = np.deg2rad(region.azimuths_deg)
    mean_az = np.rad2deg(np.arctan2(np.dot(w, np.sin(rad)), np.dot(w, np.cos(rad))))
    d_az = _wrap180(region.azimuths_deg - mean_az)
    az_spread = np.sqrt(np.dot(w, d_az**2))
    el = np.asarray(region.elevations_deg, dtype=float)
    mean_el = np.dot(w, el)
    el_spread = np.sqrt(np.dot(w, (el - mean_el) ** 2))
    return float(az_spread), float(el_spread)


def floor_pruned_lobes(realization: ChannelRealization, side, floor_dbm: float):
    """Lobes of ``side`` re-powered from the subpaths at or above ``floor_dbm``.

    Lobes left without any surviving subpath are dropped.
    """
    side = Side.parse(side)
    tab = realization.subpath_table()
    idx = tab["l1"] if side is Side.AOD else tab["l2"]
    lobes = realization.lobes(side)
    keep = tab["power_mw"] >= dbm_to_mw(floor_dbm)
    powers = np.bincount(idx[keep] - 1, weights=tab["power_mw"][keep], minlength=len(lobes))
    return [replace(lobe, total_power_mw=float(powers[i])) for i, lobe in enumerate(lobes) if powers[i] > 0]
