"""
Low, mid and high band side by side
===================================

Same 19-site, 80 km layout, three spectrum options.  Higher bands bring
far more bandwidth and a bigger array (and more beams per cell), but also
more free-space loss; the printout shows where each one ends up.

Usage::

    python demos/band_comparison.py [n_drops]
"""
import os
import sys

from nra2g.scenario import BAND_NAMES, load_scenario, preset_path
from nra2g.simengine import DL, UL, percentile, run

n = int(sys.argv[1]) if len(sys.argv) > 1 else 4000

print(f"{'band':>5} {'carrier':>9} {'beams':>5} {'ru':>6} {'DL p50':>9} {'DL max':>9} {'UL max':>9}")
for name in BAND_NAMES:
    scn = load_scenario(preset_path(name)).with_overrides(n_drops=n)
    res = run(scn, workers=os.cpu_count() or 1)
    ru = scn.ru_levels[0]
    dl = res.throughput_at(DL, ru) / 1e6
    ul = res.throughput_at(UL, ru) / 1e6
    print(f"{name:>5} {scn.band.carrier_frequency / 1e9:7.2f}GHz {scn.band.beams_per_cell:5d} "
          f"{ru:6.3f} {percentile(dl, 50):9.1f} {dl.max():9.1f} {ul.max():9.1f}   (Mbps)")

# %%
# Steering matters more as beams narrow: rerun the mid band with a fixed
# grid of four beams instead of location-aided steering.
scn = load_scenario(preset_path("mid")).with_overrides(n_drops=n, steering_mode="grid_of_beams")
res = run(scn, workers=os.cpu_count() or 1)
print(f"\nmid band, fixed grid: DL SINR p5/p50 at ru={scn.ru_levels[0]:g}: "
      f"{percentile(res.sinr_at(DL, scn.ru_levels[0]), 5):.1f} / "
      f"{percentile(res.sinr_at(DL, scn.ru_levels[0]), 50):.1f} dB")
