"""
Link budget of a sky-facing ground station
==========================================

Walks an aircraft at 12 km from right above a low-band site out to the
cell corner and prints the downlink budget terms along the way.  The
2x2 panel's main lobe points straight up, so the array gain drops as the
aircraft moves out while the path loss barely changes: a 40 km offset at
12 km altitude only adds about 11 dB of free-space loss.
"""
import math

import numpy as np

from nra2g.antenna import beam_gain, beam_grid
from nra2g.channel import dbm_to_watt, free_space_path_loss, noise_power, watt_to_dbm
from nra2g.geometry import link_geometry
from nra2g.scenario import load_scenario, preset_path

scn = load_scenario(preset_path("low"))
cfg = scn.band.array
dz = scn.aircraft_altitude - scn.gs_antenna_height
(beam,) = beam_grid(1, scn.isd / 2, dz)

p_tx = watt_to_dbm(scn.gs_total_tx_power)
noise = noise_power(scn.band.bandwidth_per_direction, scn.ue_noise_figure)
combining = 10 * math.log10(scn.ue_antenna_count)
print(f"tx {p_tx:.1f} dBm, noise {noise:.1f} dBm, rx combining +{combining:.1f} dB, "
      f"lumped loss {scn.feeder_loss:g} dB\n")

# %%
# Walk out along the x axis.  The corner of the hexagonal cell sits at
# isd/sqrt(3) = 46.2 km.
print(f"{'offset km':>9} {'zenith':>7} {'gain dBi':>9} {'FSPL dB':>8} {'SNR dB':>7}")
for d in np.linspace(0, scn.isd / math.sqrt(3), 9):
    slant, zen, az, _ = link_geometry(d, 0.0, dz)
    g = float(beam_gain(zen, az, beam, cfg))
    pl = free_space_path_loss(slant, scn.band.carrier_frequency) + scn.feeder_loss
    snr = p_tx + g - pl + combining - noise
    print(f"{d / 1e3:9.1f} {math.degrees(zen):6.1f}° {g:9.2f} {pl:8.2f} {snr:7.1f}")

# %%
# Add one fully loaded neighbour 80 km away and look at points between the
# two sites.  Both links see a zenith beam, so the ratio S/I follows the
# difference of the two gains: it collapses to 0 dB at the midpoint.


def rx(offset):
    slant, zen, az, _ = link_geometry(offset, 0.0, dz)
    return (p_tx + float(beam_gain(zen, az, beam, cfg))
            - free_space_path_loss(slant, scn.band.carrier_frequency) - scn.feeder_loss)


print()
for d in (10e3, 20e3, 30e3, 40e3):
    s, i = rx(d), rx(d - scn.isd)
    sinr = s - watt_to_dbm(dbm_to_watt(i) + dbm_to_watt(noise - combining))
    print(f"{d / 1e3:4.0f} km from the serving site: S-I = {s - i:6.2f} dB, SINR = {sinr:6.2f} dB")
