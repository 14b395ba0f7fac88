"""
Frame timing for 300 km cells at 1200 km/h
==========================================

Large cells stretch every NR timing budget.  This walk-through checks the
initial timing advance range per numerology, sizes the TDD guard period,
derives the HARQ feedback offset the resulting frame needs, and finishes
with the Doppler picture for the three carriers.
"""
from nra2g.channel import doppler, kmh_to_ms
from nra2g.nrtiming import (
    NR_MAX_K1,
    build_pattern,
    cell_traversal_time,
    dl_ul_ratio,
    earliest_k1,
    required_k1,
    timing_table,
)

RADIUS = 300e3
SPEED = kmh_to_ms(1200)

# %%
# Timing advance and the minimum TDD period for a 10% guard overhead.
rows = timing_table(RADIUS, max_overhead=0.10)
for r in rows:
    print(f"mu={r['mu']}  TA limit {r['ta_limit_ms']:.3f} ms vs RTT {r['rtt_ms']:.4f} ms "
          f"-> {'ok' if r['feasible'] else 'needs extension'};  frame {r['pattern']}, k1 {r['k1_required']}")

# %%
# The 30 kHz frame in detail: 24 DL, 4 GP, 12 UL slots.
frame = build_pattern(1, 24, 4, 12, cell_radius=RADIUS)
k1, fits = required_k1(frame)
print(f"\n30 kHz frame: period {frame.period:g} ms, guard {frame.guard_span:g} ms, "
      f"DL:UL {dl_ul_ratio(frame):g}:1")
print(f"worst-case k1 {k1} (NR allows {NR_MAX_K1}: {'fits' if fits else 'does not fit'}); "
      f"earliest-UL k1 {earliest_k1(frame)}")

# %%
# Doppler and mobility.
for f in (700e6, 3.5e9, 28e9):
    b = doppler(SPEED, f)
    print(f"{f / 1e9:5.2f} GHz: DL {b.shift_dl / 1e3:6.2f} kHz, UL before compensation "
          f"{b.shift_ul_raw / 1e3:6.2f} kHz, UE pre-shift {b.precompensation / 1e3:7.2f} kHz")
print(f"{b.shift_ppm:.2f} ppm at 1200 km/h; a 50 km radius cell is crossed in "
      f"{cell_traversal_time(50e3, SPEED) / 60:.0f} minutes")
