"""T-R distance and omnidirectional received power (close-in 1 m reference model)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import RngStream
from .params import LinkConfig

__all__ = [
    "SPEED_OF_LIGHT_M_PER_NS",
    "LinkState",
    "draw_distance",
    "path_loss_nlos",
    "received_power",
    "draw_link",
    "dbm_to_mw",
    "mw_to_dbm",
]

SPEED_OF_LIGHT_M_PER_NS = 0.3


def dbm_to_mw(p_dbm):
    return 10.0 ** (p_dbm / 10.0)


def mw_to_dbm(p_mw):
    """Works on scalars and arrays alike; scalars come back as ``float``."""
    out = 10.0 * np.log10(p_mw)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LinkState:
    distance_m: float
    path_loss_db: float
    shadow_db: float
    omni_rx_power_dbm: float
    free_space_delay_ns: float

    @property
    def omni_rx_power_mw(self) -> float:
        return dbm_to_mw(self.omni_rx_power_dbm)


def draw_distance(cfg: LinkConfig, rng: RngStream) -> float:
    """T-R separation in metres, uniform on ``[d_min, d_max)``."""
    cfg.validate()
    return float(rng.uniform(cfg.d_min, cfg.d_max))


def path_loss_nlos(cfg: LinkConfig, d: float, shadow_db: float = 0.0) -> float:
    """Omnidirectional NLOS path loss in dB at distance ``d`` metres."""
    if d < 1.0:
        raise ValueError(f"distance {d} m is below the 1 m close-in reference distance")
    return cfg.fspl_1m_db + 10.0 * cfg.ple * math.log10(d) + shadow_db


def received_power(cfg: LinkConfig, pl_db: float) -> float:
    """Omnidirectional received power in dBm."""
    return cfg.tx_power_dbm + cfg.tx_gain_dbi + cfg.rx_gain_dbi - pl_db


def draw_link(cfg: LinkConfig, rng: RngStream) -> LinkState:
    d = draw_distance(cfg, rng)
    shadow = float(rng.normal(0.0, cfg.shadow_sigma_db))
    pl = path_loss_nlos(cfg, d, shadow)
    return LinkState(
        distance_m=d,
        path_loss_db=pl,
        shadow_db=shadow,
        omni_rx_power_dbm=received_power(cfg, pl),
        free_space_delay_ns=d / SPEED_OF_LIGHT_M_PER_NS,
    )
