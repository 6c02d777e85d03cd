"""Model constants for the 28 GHz dense-urban NLOS channel.

Defaults are the fitted values of the New York City 28 GHz campaign. Every
field can be overridden by name through :meth:`ModelParams.with_overrides`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

__all__ = [
    "ParameterError",
    "LinkConfig",
    "TemporalParams",
    "SpatialParams",
    "ModelParams",
]


class ParameterError(ValueError):
    """A model parameter violates its constraint."""

    def __init__(self, name: str, constraint: str, value=None):
        self.name = name
        self.constraint = constraint
        self.value = value
        super().__init__(f"{name}={value!r} violates constraint: {constraint}")


def _require(ok: bool, name: str, constraint: str, value) -> None:
    if not ok:
        raise ParameterError(name, constraint, value)


@dataclass(frozen=True)
class LinkConfig:
    """T-R distance range and omnidirectional path loss constants.

    Transmit power and horn gains default to the sounder used for the
    measurements (30 dBm, 24.5 dBi each end), which together with the
    -100 dBm floor give the ~178 dB measurable path loss range.
    """

    tx_power_dbm: float = 30.0
    tx_gain_dbi: float = 24.5
    rx_gain_dbi: float = 24.5
    d_min: float = 60.0
    d_max: float = 200.0
    ple: float = 3.4
    shadow_sigma_db: float = 9.7
    fspl_1m_db: float = 61.4
    wavelength_m: float = 0.0107  # informational only

    def validate(self) -> None:
        _require(self.d_min >= 1.0, "d_min", "d_min >= 1 m", self.d_min)
        _require(self.d_min <= self.d_max, "d_max", "d_min <= d_max", self.d_max)
        _require(self.ple > 0, "ple", "ple > 0", self.ple)
        _require(self.shadow_sigma_db >= 0, "shadow_sigma_db", ">= 0", self.shadow_sigma_db)


@dataclass(frozen=True)
class TemporalParams:
    """Time-cluster and intra-cluster subpath constants."""

    n_max: int = 6
    m_max: int = 30
    mu_tau_ns: float = 83.0
    inter_cluster_void_ns: float = 25.0
    cluster_decay_ns: float = 49.4
    cluster_p0: float = 0.883
    subpath_decay_ns: float = 16.9
    subpath_p0: float = 0.342
    cluster_shadow_sigma_db: float = 3.0
    subpath_shadow_sigma_db: float = 6.0
    bb_bandwidth_hz: float = 400e6
    x_max: float = 0.43
    carrier_hz: float = 28e9
    min_subpath_power_dbm: float = -100.0

    def validate(self) -> None:
        _require(self.n_max >= 1 and int(self.n_max) == self.n_max, "n_max", "integer >= 1", self.n_max)
        _require(self.m_max >= 1 and int(self.m_max) == self.m_max, "m_max", "integer >= 1", self.m_max)
        for name in ("mu_tau_ns", "cluster_decay_ns", "subpath_decay_ns", "bb_bandwidth_hz", "carrier_hz"):
            value = getattr(self, name)
            _require(value > 0, name, "> 0", value)
        _require(self.inter_cluster_void_ns >= 0, "inter_cluster_void_ns", ">= 0", self.inter_cluster_void_ns)
        _require(0 < self.cluster_p0 <= 1, "cluster_p0", "0 < cluster_p0 <= 1", self.cluster_p0)
        _require(0 < self.subpath_p0 <= 1, "subpath_p0", "0 < subpath_p0 <= 1", self.subpath_p0)
        _require(self.x_max >= 0, "x_max", ">= 0", self.x_max)
        for name in ("cluster_shadow_sigma_db", "subpath_shadow_sigma_db"):
            value = getattr(self, name)
            _require(value >= 0, name, ">= 0", value)

    @property
    def min_subpath_interval_ns(self) -> float:
        return 1e9 / self.bb_bandwidth_hz


@dataclass(frozen=True)
class SpatialParams:
    """Lobe count, lobe angle, lobe spread and segment-shaping constants."""

    l_max: int = 5
    mu_aod: float = 1.6
    mu_aoa: float = 1.7
    aod_poisson_offset: float = 0.2
    aoa_poisson_offset: float = 0.1
    aod_elev_mean_deg: float = -4.9
    aod_elev_std_deg: float = 4.5
    aoa_elev_mean_deg: float = 3.6
    aoa_elev_std_deg: float = 4.8
    aod_az_spread_mean_deg: float = 30.0
    aod_az_spread_std_deg: float = 16.0
    aod_az_spread_floor_deg: int = 5
    aod_elev_spread_deg: int = 10
    aoa_az_spread_dln_mean_deg: float = 32.0
    aoa_az_spread_dln_std_deg: float = 18.0
    aoa_elev_spread_mean_deg: float = 31.0
    aoa_elev_spread_std_deg: float = 11.0
    aoa_elev_spread_floor_deg: int = 5
    aod_sigma_theta_mean_deg: float = 6.6
    aod_sigma_theta_std_deg: float = 3.5
    aod_sigma_phi_mean_deg: float = 5.0
    aod_sigma_phi_std_deg: float = 0.0
    aoa_sigma_theta_mean_deg: float = 6.0
    aoa_sigma_theta_std_deg: float = 1.0
    aoa_sigma_phi_mean_deg: float = 6.0
    aoa_sigma_phi_std_deg: float = 2.0
    sigma_floor_deg: float = 0.5
    segment_floor: float = 0.1
    max_lobe_overlap: float = 0.10

    def validate(self) -> None:
        _require(self.l_max >= 1 and int(self.l_max) == self.l_max, "l_max", "integer >= 1", self.l_max)
        for name in ("mu_aod", "mu_aoa"):
            value = getattr(self, name)
            _require(value >= 0, name, ">= 0", value)
        _require(self.mu_aod + self.aod_poisson_offset > 0, "aod_poisson_offset", "mu_aod + offset > 0",
                 self.aod_poisson_offset)
        _require(self.mu_aoa + self.aoa_poisson_offset > 0, "aoa_poisson_offset", "mu_aoa + offset > 0",
                 self.aoa_poisson_offset)
        for f in fields(self):
            if f.name.endswith("_std_deg"):
                value = getattr(self, f.name)
                _require(value >= 0, f.name, ">= 0", value)
        for name in ("aod_az_spread_floor_deg", "aod_elev_spread_deg", "aoa_elev_spread_floor_deg"):
            value = getattr(self, name)
            _require(value >= 1 and int(value) == value, name, "integer >= 1", value)
        _require(self.aoa_az_spread_dln_mean_deg > 0, "aoa_az_spread_dln_mean_deg", "> 0",
                 self.aoa_az_spread_dln_mean_deg)
        _require(self.sigma_floor_deg > 0, "sigma_floor_deg", "> 0", self.sigma_floor_deg)
        _require(0 < self.segment_floor <= 1, "segment_floor", "0 < segment_floor <= 1", self.segment_floor)
        _require(0 <= self.max_lobe_overlap <= 1, "max_lobe_overlap", "0 <= max_lobe_overlap <= 1",
                 self.max_lobe_overlap)


_GROUPS = ("link", "temporal", "spatial")


@dataclass(frozen=True)
class ModelParams:
    """All constants of the model, grouped by generation stage."""

    link: LinkConfig = field(default_factory=LinkConfig)
    temporal: TemporalParams = field(default_factory=TemporalParams)
    spatial: SpatialParams = field(default_factory=SpatialParams)

    def validate(self) -> "ModelParams":
        self.link.validate()
        self.temporal.validate()
        self.spatial.validate()
        return self

    @classmethod
    def field_names(cls) -> dict[str, str]:
        """Map of flat parameter name -> group name."""
        out = {}
        for group, klass in zip(_GROUPS, (LinkConfig, TemporalParams, SpatialParams)):
            for f in fields(klass):
                out[f.name] = group
        return out

    def with_overrides(self, overrides: dict | None = None, **kwargs) -> "ModelParams":
        """Return a validated copy with parameters replaced by flat name.

        Names may also be qualified with their group, e.g. ``"link.ple"``.
        """
        merged = dict(overrides or {})
        merged.update(kwargs)
        known = self.field_names()
        per_group: dict[str, dict] = {g: {} for g in _GROUPS}
        for key, value in merged.items():
            group, _, name = key.rpartition(".")
            if name not in known or (group and group != known[name]):
                raise ParameterError(key, "unknown parameter name", value)
            current = getattr(getattr(self, known[name]), name)
            per_group[known[name]][name] = _coerce(name, value, current)
        new = ModelParams(
            **{g: dataclasses.replace(getattr(self, g), **per_group[g]) for g in _GROUPS}
        )
        return new.validate()

    def to_dict(self) -> dict:
        return {g: dataclasses.asdict(getattr(self, g)) for g in _GROUPS}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        """Build from either a grouped (``{"link": {...}}``) or flat mapping."""
        flat = {}
        for key, value in data.items():
            if key in _GROUPS and isinstance(value, dict):
                flat.update({f"{key}.{k}": v for k, v in value.items()})
            else:
                flat[key] = value
        return cls().with_overrides(flat)


def _coerce(name: str, value, current):
    try:
        if isinstance(current, bool):
            return bool(value)
        if isinstance(current, int):
            as_float = float(value)
            if as_float != int(as_float):
                raise ParameterError(name, "integer value", value)
            return int(as_float)
        return float(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(name, f"numeric value expected ({exc})", value) from None
