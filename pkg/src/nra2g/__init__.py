"""
NR air-to-ground system simulator and feasibility calculators.

Modules
-------
scenario   band presets, scenario files
geometry   hex layout, wrap-around, link geometry
antenna    element pattern, array factor, beam grids
channel    free-space loss, noise, Doppler
simengine  Monte Carlo SINR/throughput engine
nrtiming   timing advance, guard period, TDD and HARQ checks
cli        ``nra2g`` command-line entry point
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
