#! /usr/bin/env python3
"""Walk through one channel realization, from link budget to taps.

Run from the repository root::

    python3 demos/single_channel.py [seed]

Prints the link, the time clusters and the strongest taps, and saves a
power delay profile figure when matplotlib is installed.
"""

import sys

import numpy as np

from mmwsscm import ModelParams, RngStream, generate_channel, impulse_response
from mmwsscm.analysis import rms_delay_spread, synthesize_pdp
from mmwsscm.link import mw_to_dbm

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 3
params = ModelParams()
channel = generate_channel(params, RngStream(seed))

# link budget: distance, shadowed path loss, omnidirectional received power
link = channel.link
print(f"T-R separation   {link.distance_m:7.1f} m")
print(f"path loss        {link.path_loss_db:7.1f} dB  (shadowing {link.shadow_db:+.1f} dB)")
print(f"received power   {link.omni_rx_power_dbm:7.1f} dBm")
print(f"first arrival    {link.free_space_delay_ns:7.1f} ns")
print()

# time clusters: excess delay, share of the received power, subpath count
print(" n   excess delay   power share   subpaths   below -100 dBm")
pr = link.omni_rx_power_mw
for c in channel.clusters:
    print(f"{c.index:2d}   {c.excess_delay_ns:9.1f} ns   {c.power_mw / pr:10.3f}   "
          f"{c.num_subpaths:8d}   {int(c.below_floor.sum()):8d}")
print()

# every subpath becomes one tap with a lobe pair for its departure and arrival angles
taps = impulse_response(channel)
strongest = sorted(taps, key=lambda t: -t.amplitude)[:5]
print("strongest taps")
for t in strongest:
    print(f"  t={t.t_ns:8.2f} ns  P={mw_to_dbm(t.amplitude**2):6.1f} dBm  "
          f"AOD=({t.aod_az:5.1f}, {t.aod_el:+5.1f})  AOA=({t.aoa_az:5.1f}, {t.aoa_el:+5.1f})")

full = synthesize_pdp(channel)
seen = synthesize_pdp(channel, floor_dbm=params.temporal.min_subpath_power_dbm)
print()
print(f"RMS delay spread {rms_delay_spread(full):.1f} ns, "
      f"{rms_delay_spread(seen) if len(seen) else float('nan'):.1f} ns above the -100 dBm floor")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, ax = plt.subplots(figsize=(7, 3.5))
excess = full.times_ns - full.times_ns[0]
ax.vlines(excess, -200, mw_to_dbm(full.powers_mw), lw=0.8)
ax.axhline(params.temporal.min_subpath_power_dbm, color="grey", ls="--", lw=0.8)
ax.set_ylim(np.floor(mw_to_dbm(full.powers_mw).min() / 10) * 10 - 5, None)
ax.set_xlabel("excess delay (ns)")
ax.set_ylabel("power (dBm)")
ax.set_title(f"omnidirectional PDP, seed {seed}")
fig.tight_layout()
fig.savefig("single_channel_pdp.png", dpi=120)
print("saved single_channel_pdp.png")
