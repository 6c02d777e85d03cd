"""On-disk formats for realizations, spectra and statistics reports.

Two families, both carrying ``format_version`` on every record:

tabular
    ``taps.csv`` (one row per subpath), ``lobes.csv`` and ``links.csv``.
structured
    ``realizations.jsonl`` (one JSON object per channel).

Floats are written with ``repr`` so that re-reading is exact.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .channel import ChannelRealization, impulse_response
from .link import LinkState, mw_to_dbm
from .spatial import Side, SpatialLobe
from .temporal import TimeCluster

__all__ = [
    "FORMAT_VERSION",
    "TAP_COLUMNS",
    "LOBE_COLUMNS",
    "LINK_COLUMNS",
    "SPECTRUM_COLUMNS",
    "dumps",
    "realization_to_dict",
    "realization_from_dict",
    "write_structured",
    "read_structured",
    "TabularWriter",
    "read_taps_csv",
    "spectrum_cells",
    "write_spectrum",
    "read_spectrum",
]

FORMAT_VERSION = 1

TAP_COLUMNS = [
    "format_version", "realization", "n", "m", "t_ns", "power_mw", "phase_rad",
    "aod_az", "aod_el", "aoa_az", "aoa_el", "l1", "l2", "below_floor",
]
LOBE_COLUMNS = [
    "format_version", "realization", "side", "index", "mean_azimuth_deg", "mean_elevation_deg",
    "azimuth_spread_deg", "elevation_spread_deg", "total_power_mw", "sigma_theta_deg",
    "sigma_phi_deg", "az_offset_start", "el_offset_start",
]
LINK_COLUMNS = [
    "format_version", "realization", "distance_m", "path_loss_db", "shadow_db",
    "omni_rx_power_dbm", "free_space_delay_ns", "num_clusters", "num_aod_lobes", "num_aoa_lobes",
]
SPECTRUM_COLUMNS = ["format_version", "azimuth_deg", "elevation_deg", "power_mw"]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Side):
        return obj.value
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def dumps(obj, indent: int | None = None) -> str:
    """Deterministic JSON (sorted keys, numpy scalars converted, non-finite -> null)."""
    return json.dumps(_plain(obj), sort_keys=True, indent=indent,
                      separators=(",", ": ") if indent else (",", ":"))


# -- structured -----------------------------------------------------------------------


def _lobe_to_dict(lobe: SpatialLobe) -> dict:
    return {
        "index": lobe.index,
        "mean_azimuth_deg": lobe.mean_azimuth_deg,
        "mean_elevation_deg": lobe.mean_elevation_deg,
        "azimuth_spread_deg": lobe.azimuth_spread_deg,
        "elevation_spread_deg": lobe.elevation_spread_deg,
        "total_power_mw": lobe.total_power_mw,
        "sigma_theta_deg": lobe.sigma_theta_deg,
        "sigma_phi_deg": lobe.sigma_phi_deg,
        "az_offset_start": lobe.az_offset_start,
        "el_offset_start": lobe.el_offset_start,
        "segment_floor": lobe.segment_floor,
    }


def realization_to_dict(realization: ChannelRealization, realization_id: int) -> dict:
    link = realization.link
    return {
        "format_version": FORMAT_VERSION,
        "realization": realization_id,
        "link": {
            "distance_m": link.distance_m,
            "path_loss_db": link.path_loss_db,
            "shadow_db": link.shadow_db,
            "omni_rx_power_dbm": link.omni_rx_power_dbm,
            "omni_rx_power_mw": link.omni_rx_power_mw,
            "free_space_delay_ns": link.free_space_delay_ns,
        },
        "clusters": [
            {
                "index": c.index,
                "excess_delay_ns": c.excess_delay_ns,
                "power_mw": c.power_mw,
                "power_dbm": mw_to_dbm(c.power_mw),
                "intra_delays_ns": c.intra_delays_ns,
                "powers_mw": c.powers_mw,
                "phases_rad": c.phases_rad,
                "abs_times_ns": c.abs_times_ns,
                "below_floor": c.below_floor,
            }
            for c in realization.clusters
        ],
        "aod_lobes": [_lobe_to_dict(lobe) for lobe in realization.aod_lobes],
        "aoa_lobes": [_lobe_to_dict(lobe) for lobe in realization.aoa_lobes],
        "aod_lobe_index": realization.aod_lobe_index,
        "aoa_lobe_index": realization.aoa_lobe_index,
    }


def realization_from_dict(d: dict) -> ChannelRealization:
    if d.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {d.get('format_version')!r}")
    ld = d["link"]
    link = LinkState(ld["distance_m"], ld["path_loss_db"], ld["shadow_db"],
                     ld["omni_rx_power_dbm"], ld["free_space_delay_ns"])
    clusters = [
        TimeCluster(
            index=c["index"],
            excess_delay_ns=c["excess_delay_ns"],
            power_mw=c["power_mw"],
            intra_delays_ns=np.array(c["intra_delays_ns"], dtype=float),
            powers_mw=np.array(c["powers_mw"], dtype=float),
            phases_rad=np.array(c["phases_rad"], dtype=float),
            abs_times_ns=np.array(c["abs_times_ns"], dtype=float),
            below_floor=np.array(c["below_floor"], dtype=bool),
        )
        for c in d["clusters"]
    ]

    def lobes(key, side):
        return [SpatialLobe(side=side, **ld) for ld in d[key]]

    return ChannelRealization(
        link=link,
        clusters=clusters,
        aod_lobes=lobes("aod_lobes", Side.AOD),
        aoa_lobes=lobes("aoa_lobes", Side.AOA),
        aod_lobe_index=np.array(d["aod_lobe_index"], dtype=np.int64),
        aoa_lobe_index=np.array(d["aoa_lobe_index"], dtype=np.int64),
    )


def write_structured(fh: TextIO, realization: ChannelRealization, realization_id: int) -> None:
    fh.write(dumps(realization_to_dict(realization, realization_id)))
    fh.write("\n")


def read_structured(path) -> Iterable[tuple[int, ChannelRealization]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                yield d["realization"], realization_from_dict(d)


# -- tabular --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class TabularWriter:
    """Writes ``taps.csv``, ``lobes.csv`` and ``links.csv`` into a directory."""

    def __init__(self, out_dir):
        out_dir = Path(out_dir)
        self._files = {name: open(out_dir / f"{name}.csv", "w", newline="", encoding="utf-8")
                       for name in ("taps", "lobes", "links")}
        self._writers = {name: csv.writer(fh, lineterminator="\n") for name, fh in self._files.items()}
        self._writers["taps"].writerow(TAP_COLUMNS)
        self._writers["lobes"].writerow(LOBE_COLUMNS)
        self._writers["links"].writerow(LINK_COLUMNS)

    def write(self, realization: ChannelRealization, realization_id: int) -> None:
        v = FORMAT_VERSION
        floor = {(c.index, m + 1): c.below_floor[m] for c in realization.clusters for m in range(c.num_subpaths)}
        power = {(c.index, m + 1): c.powers_mw[m] for c in realization.clusters for m in range(c.num_subpaths)}
        rows = []
        for tap in impulse_response(realization):
            key = (tap.cluster, tap.subpath)
            rows.append([v, realization_id, tap.cluster, tap.subpath, tap.t_ns, power[key], tap.phase_rad,
                         tap.aod_az, tap.aod_el, tap.aoa_az, tap.aoa_el, tap.aod_lobe, tap.aoa_lobe, floor[key]])
        self._writers["taps"].writerows([[_fmt(x) for x in row] for row in rows])
        for lobe in realization.aod_lobes + realization.aoa_lobes:
            d = _lobe_to_dict(lobe)
            row = [v, realization_id, lobe.side.value] + [d[c] for c in LOBE_COLUMNS[3:]]
            self._writers["lobes"].writerow([_fmt(x) for x in row])
        link = realization.link
        self._writers["links"].writerow([_fmt(x) for x in [
            v, realization_id, link.distance_m, link.path_loss_db, link.shadow_db, link.omni_rx_power_dbm,
            link.free_space_delay_ns, realization.num_clusters, len(realization.aod_lobes),
            len(realization.aoa_lobes)]])

    def close(self) -> None:
        for fh in self._files.values():
            fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_taps_csv(path) -> dict[int, dict[str, np.ndarray]]:
    """Group ``taps.csv`` rows by realization id into column arrays."""
    out: dict[int, dict[str, list]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if int(row["format_version"]) != FORMAT_VERSION:
                raise ValueError(f"unsupported format_version {row['format_version']!r}")
            cols = out.setdefault(int(row["realization"]), {c: [] for c in TAP_COLUMNS[2:]})
            for c in TAP_COLUMNS[2:]:
                cols[c].append(row[c])
    result = {}
    for rid, cols in out.items():
        arr = {}
        for c, values in cols.items():
            if c in ("t_ns", "power_mw", "phase_rad"):
                arr[c] = np.array(values, dtype=float)
            elif c == "below_floor":
                arr[c] = np.array(values, dtype=np.int64).astype(bool)
            else:
                arr[c] = np.array(values, dtype=np.int64)
        result[rid] = arr
    return result


# -- spectra --------------------------------------------------------------------------


def spectrum_cells(grid: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sparse ``(azimuth_deg, elevation_deg, power_mw)`` of the non-zero cells."""
    az, el = np.nonzero(grid)
    return az, el - 90, grid[az, el]


def write_spectrum(path, grid: np.ndarray, fmt: str, meta: dict) -> None:
    az, el, p = spectrum_cells(grid)
    path = Path(path)
    if fmt == "tabular":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SPECTRUM_COLUMNS)
            for a, e, q in zip(az, el, p):
                w.writerow([FORMAT_VERSION, int(a), int(e), repr(float(q))])
    else:
        doc = dict(meta)
        doc.update({
            "format_version": FORMAT_VERSION,
            "grid": {"azimuth_deg": [0, 359], "elevation_deg": [-90, 90], "shape": [360, 181]},
            "units": "mW",
            "total_power_mw": float(p.sum()),
            "cells": [[int(a), int(e), float(q)] for a, e, q in zip(az, el, p)],
        })
        path.write_text(dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_spectrum(path) -> np.ndarray:
    path = Path(path)
    grid = np.zeros((360, 181))
    if path.suffix == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                grid[int(row["azimuth_deg"]), int(row["elevation_deg"]) + 90] = float(row["power_mw"])
    else:
        doc = json.loads(path.read_text(encoding="utf-8"))
        for a, e, q in doc["cells"]:
            grid[a, e + 90] = q
    return grid
