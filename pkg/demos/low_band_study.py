"""
Low-band SINR and throughput at two site spacings
=================================================

Runs the shipped low-band preset at 80 km and 160 km inter-site distance
across a sweep of resource-utilization (RU) levels, prints the
5th/50th/99th percentiles and writes per-point CDF files for plotting.

Usage::

    python demos/low_band_study.py [output-dir] [n_drops]
"""
import os
import sys
from pathlib import Path

from nra2g.scenario import load_scenario, preset_path
from nra2g.simengine import DL, UL, percentile, run

out = Path(sys.argv[1] if len(sys.argv) > 1 else os.environ.get("NRA2G_OUTPUT_DIR", "demo-out"))
n = int(sys.argv[2]) if len(sys.argv) > 2 else 10_000
base = load_scenario(preset_path("low")).with_overrides(
    n_drops=n, ru_levels=(0.003, 0.006, 0.017, 0.2, 0.79, 1.0))

# %%
# Both spacings share the seed, so every drop sees the same random
# draws; only the geometry differs.
results = {}
for isd in (80_000, 160_000):
    res = run(base.with_overrides(isd=isd), workers=os.cpu_count() or 1)
    res.write(out / f"low_isd{isd // 1000}km")
    results[isd] = res

print("DL SINR 5th percentile (dB)")
print(f"{'ru':>6} {'80 km':>7} {'160 km':>7} {'gap':>6}")
for ru in base.ru_levels:
    a = percentile(results[80_000].sinr_at(DL, ru), 5)
    b = percentile(results[160_000].sinr_at(DL, ru), 5)
    print(f"{ru:6.3f} {a:7.2f} {b:7.2f} {a - b:6.2f}")

# %%
# Throughput: downlink at heavy load, uplink at light load, which is the
# operating point of downlink-heavy cabin traffic.
r80 = results[80_000]
for d, ru in ((DL, 0.79), (UL, 0.017)):
    rates = r80.throughput_at(d, ru) / 1e6
    p = [percentile(rates, q) for q in (5, 50, 90, 99)]
    print(f"{d} ru={ru:g}: p5 {p[0]:.2f}  p50 {p[1]:.2f}  p90 {p[2]:.2f}  p99 {p[3]:.2f} Mbps")

print(f"\nCDF files written under {out}/")
