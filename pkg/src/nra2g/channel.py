"""
LOS path loss, link budgets, thermal noise and Doppler arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "THERMAL_NOISE_DBM_HZ",
    "LinkBudget",
    "DopplerBudget",
    "free_space_path_loss",
    "noise_power",
    "doppler",
    "uplink_precompensation",
    "shadowing",
    "watt_to_dbm",
    "dbm_to_watt",
    "kmh_to_ms",
]

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_HZ = -174.0


def watt_to_dbm(p):
    return 10 * np.log10(p) + 30.0


def dbm_to_watt(p):
    return 10 ** ((np.asarray(p) - 30.0) / 10)


def kmh_to_ms(v):
    return v / 3.6


@dataclass(frozen=True)
class LinkBudget:
    tx_power: float
    tx_gain: float
    rx_gain: float
    path_loss: float

    @property
    def rx_power(self) -> float:
        return self.tx_power + self.tx_gain + self.rx_gain - self.path_loss


@dataclass(frozen=True)
class DopplerBudget:
    """Maximum Doppler shift for a UE moving radially at ``speed``.

    ``shift_ul_raw`` is the shift seen at the ground station when the UE
    transmits on its own (Doppler-shifted) downlink reference, i.e. twice
    the downlink shift.  ``shift_ul_residual`` is what is left after
    :func:`uplink_precompensation`.
    """

    speed: float
    carrier: float
    shift_dl: float
    shift_ppm: float
    shift_ul_raw: float
    precompensation: float
    shift_ul_residual: float


def free_space_path_loss(distance, carrier):
    """Friis free-space loss ``20*log10(4*pi*d*f/c)`` in dB."""
    d = np.asarray(distance, dtype=float)
    f = np.asarray(carrier, dtype=float)
    if np.any(d <= 0) or np.any(f <= 0):
        raise ValueError("distance and carrier must be > 0")
    out = 20 * np.log10(4 * np.pi * d * f / SPEED_OF_LIGHT)
    return float(out) if out.ndim == 0 else out


def noise_power(bandwidth, noise_figure):
    """Thermal noise power in dBm over ``bandwidth`` Hz."""
    if np.any(np.asarray(bandwidth) <= 0):
        raise ValueError("bandwidth must be > 0")
    return THERMAL_NOISE_DBM_HZ + 10 * np.log10(bandwidth) + noise_figure


def uplink_precompensation(observed_dl_shift):
    """Transmit-frequency adjustment that cancels the uplink Doppler shift.

    Under the radial-motion model the ground station sees twice the
    downlink shift, so the UE pre-shifts by ``-2 * observed_dl_shift``.
    Returns ``(adjustment, residual)``.
    """
    shift = np.asarray(observed_dl_shift, dtype=float)
    adjustment = -2.0 * shift
    residual = 2.0 * shift + adjustment
    if adjustment.ndim == 0:
        return float(adjustment) + 0.0, float(residual) + 0.0
    return adjustment + 0.0, residual


def doppler(speed: float, carrier: float) -> DopplerBudget:
    if speed < 0:
        raise ValueError("speed must be >= 0")
    ratio = speed / SPEED_OF_LIGHT
    dl = ratio * carrier
    adj, residual = uplink_precompensation(dl)
    return DopplerBudget(speed, carrier, dl, ratio * 1e6, 2 * dl, adj, residual)


def shadowing(rng: np.random.Generator, shape, std_db: float):
    """Log-normal shadowing samples in dB; all zeros when ``std_db == 0``."""
    z = rng.standard_normal(shape)
    return z * std_db
