#! /usr/bin/env python3
"""Pool secondary statistics over an ensemble and compare them with the bands.

    python3 demos/ensemble_validation.py [size] [workers]

With the default 10,000 channels this takes about half a minute on one
core. The decay fits are shown in both the linear and the log domain;
the linear one is what the bands are checked against.
"""

import sys

import numpy as np

from mmwsscm import ModelParams
from mmwsscm.ensemble import check_acceptance, run_ensemble

size = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
workers = int(sys.argv[2]) if len(sys.argv) > 2 else 1

stats = run_ensemble(ModelParams(), seed=1, size=size, validation_mode=True, workers=workers)

for name, res in check_acceptance(stats).items():
    mark = "ok " if res["passed"] else "OUT"
    print(f"{mark} {name:28s} {res['value']:8.3f}   band [{res['low']:.3f}, {res['high']:.3f}]")

log = stats.log_fits
print(f"\nlog-domain fits: clusters P0={log['cluster_p0']:.3f} decay={log['cluster_decay_ns']:.1f} ns, "
      f"subpaths P0={log['subpath_p0']:.3f} decay={log['subpath_decay_ns']:.1f} ns")

counts = np.bincount(stats.cluster_counts, minlength=7)[1:]
print("\nclusters per channel  " + "  ".join(f"{n}:{c}" for n, c in enumerate(counts, start=1)))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
ds = np.sort(stats.rms_delay_spreads_ns)
axes[0].plot(ds, np.arange(1, len(ds) + 1) / len(ds))
axes[0].set_xlabel("RMS delay spread (ns)")
axes[0].set_ylabel("CDF")
for values, label in ((stats.rms_lobe_az_spreads_deg, "azimuth"), (stats.rms_lobe_el_spreads_deg, "elevation")):
    v = np.sort(values)
    axes[1].plot(v, np.arange(1, len(v) + 1) / len(v), label=label)
axes[1].set_xlabel("RMS lobe spread (deg)")
axes[1].legend()
fig.tight_layout()
fig.savefig("ensemble_cdfs.png", dpi=120)
print("saved ensemble_cdfs.png")
