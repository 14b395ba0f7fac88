"""
Antenna element pattern, planar array factor and per-cell beam grids.

Angles are in radians throughout.  A ground-station panel lies flat and
faces the sky, so a global direction ``(zenith_offset, azimuth)`` is first
mapped to the panel's own vertical/horizontal off-boresight angles by
:func:`sky_panel_angles` before the element pattern is evaluated.  The
panel's vertical axis (array rows) is the global x axis.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import AntennaArrayConfig

__all__ = [
    "Beam",
    "element_gain",
    "sky_panel_angles",
    "panel_element_gain",
    "array_factor_db",
    "beam_gain",
    "beam_regions",
    "beam_grid",
    "polygon_area_centroid",
    "write_pattern_csv",
    "AF_FLOOR_DB",
]

# numerical floor for the array factor in exact nulls
AF_FLOOR_DB = -300.0


@dataclass(frozen=True)
class Beam:
    steer_zenith_offset: float
    steer_azimuth: float
    index: int = 0
    aim_x: float = 0.0
    aim_y: float = 0.0


def element_gain(theta_off, phi_off, cfg: AntennaArrayConfig):
    """TR 38.901 single-element gain in dBi.

    ``theta_off`` is the vertical and ``phi_off`` the horizontal angle away
    from the element boresight.  Vectorized over both arguments.
    """
    th = np.degrees(theta_off)
    ph = np.degrees(phi_off)
    a_v = -np.minimum(12.0 * (th / cfg.beamwidth_3db) ** 2, cfg.sla_v)
    a_h = -np.minimum(12.0 * (ph / cfg.beamwidth_3db) ** 2, cfg.a_max)
    return cfg.element_max_gain - np.minimum(-(a_v + a_h), cfg.a_max)


def sky_panel_angles(zenith_offset, azimuth):
    """Map a global direction to the panel's (vertical, horizontal) offsets."""
    s = np.sin(zenith_offset)
    ux = s * np.cos(azimuth)
    uy = s * np.sin(azimuth)
    uz = np.cos(zenith_offset)
    return np.arcsin(np.clip(ux, -1.0, 1.0)), np.arctan2(uy, uz)


def panel_element_gain(zenith_offset, azimuth, cfg: AntennaArrayConfig):
    return element_gain(*sky_panel_angles(zenith_offset, azimuth), cfg)


def _dirichlet_sq(psi, n: int):
    # |sum_{k<n} exp(j k psi)|^2
    if n == 1:
        return np.ones_like(psi)
    half = 0.5 * psi
    den = np.sin(half)
    small = np.abs(den) < 1e-9
    ratio = np.sin(n * half) / np.where(small, 1.0, den)
    # at psi = 2*pi*m the limit is n^2
    return np.where(small, float(n * n), ratio * ratio)


def array_factor_db(obs_zenith, obs_azimuth, steer_zenith, steer_azimuth,
                    cfg: AntennaArrayConfig):
    """Power gain of the phase-steered planar array, unit-power weights.

    Equals ``10*log10(M*N)`` in the steering direction.
    """
    so, ss = np.sin(obs_zenith), np.sin(steer_zenith)
    du = so * np.cos(obs_azimuth) - ss * np.cos(steer_azimuth)
    dv = so * np.sin(obs_azimuth) - ss * np.sin(steer_azimuth)
    psi_x = 2 * np.pi * cfg.element_spacing_v * du
    psi_y = 2 * np.pi * cfg.element_spacing_h * dv
    power = _dirichlet_sq(psi_x, cfg.m_rows) * _dirichlet_sq(psi_y, cfg.n_cols)
    power = power / cfg.n_elements
    return np.maximum(10 * np.log10(np.maximum(power, 1e-300)), AF_FLOOR_DB)


def beam_gain(obs_zenith, obs_azimuth, beam: Beam | tuple, cfg: AntennaArrayConfig):
    """Element gain plus array factor towards an observation direction, dBi.

    ``beam`` is a :class:`Beam` or a ``(steer_zenith, steer_azimuth)`` pair of
    (broadcastable) arrays.
    """
    if isinstance(beam, Beam):
        sz, sa = beam.steer_zenith_offset, beam.steer_azimuth
    else:
        sz, sa = beam
    return (panel_element_gain(obs_zenith, obs_azimuth, cfg)
            + array_factor_db(obs_zenith, obs_azimuth, sz, sa, cfg))


# ---------------------------------------------------------------------------
# beam grids

_TAN30 = math.tan(math.pi / 6)


def _angle_at_fraction(f: float) -> float:
    """Polar angle where the hex area swept from -30 deg reaches fraction f.

    The hexagon has its flat sides facing 0, 60, ... degrees, so each
    60-degree wedge centred on an apothem holds 1/6 of the area.
    """
    f = min(max(f, 0.0), 1.0)
    w = min(int(f * 6), 5)
    g = f * 6 - w
    return math.radians(60 * w) + math.atan((2 * g - 1) * _TAN30)


def _hex_boundary(phi: float, apothem: float) -> tuple[float, float]:
    centre = round(phi / (math.pi / 3)) * (math.pi / 3)
    r = apothem / math.cos(phi - centre)
    return r * math.cos(phi), r * math.sin(phi)


def _boundary_arc(a: float, b: float, apothem: float) -> list[tuple[float, float]]:
    pts = [_hex_boundary(a, apothem)]
    # hex vertices sit at -30 + 60*i degrees
    first = math.ceil((a + math.pi / 6) / (math.pi / 3) + 1e-12)
    i = first
    while True:
        v = -math.pi / 6 + i * math.pi / 3
        if v >= b - 1e-12:
            break
        pts.append(_hex_boundary(v, apothem))
        i += 1
    pts.append(_hex_boundary(b, apothem))
    return pts


def polygon_area_centroid(poly) -> tuple[float, float, float]:
    """Shoelace area and centroid of a simple polygon given as (x, y) pairs."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6 * area)
    cy = ((y + yn) * cross).sum() / (6 * area)
    return abs(area), cx, cy


def beam_regions(n_beams: int, apothem: float) -> list[list[tuple[float, float]]]:
    """Partition a site-centred hexagon into ``n_beams`` equal-area regions.

    ``n_beams = k*k``.  Ring ``j`` (1..k) lies between the hexagons scaled by
    ``(j-1)/k`` and ``j/k`` and is cut into ``2j-1`` angular sectors of equal
    area, so every region holds ``1/k**2`` of the footprint.
    """
    k = math.isqrt(n_beams)
    if n_beams < 1 or k * k != n_beams:
        raise ValueError(f"beam grid needs a square beam count, got {n_beams}")
    regions = []
    for j in range(1, k + 1):
        n_sec = 2 * j - 1
        outer, inner = apothem * j / k, apothem * (j - 1) / k
        for s in range(n_sec):
            a = _angle_at_fraction(s / n_sec)
            b = _angle_at_fraction((s + 1) / n_sec)
            if n_sec == 1 and inner == 0:
                regions.append(_boundary_arc(-math.pi / 6, 11 * math.pi / 6, outer)[:-1])
                continue
            poly = _boundary_arc(a, b, outer)
            if inner > 0:
                poly += _boundary_arc(a, b, inner)[::-1]
            else:
                poly.append((0.0, 0.0))
            regions.append(poly)
    return regions


def beam_grid(n_beams: int, apothem: float, height_above_site: float) -> list[Beam]:
    """Fixed beams aimed at the centroids of an equal-area footprint partition.

    Parameters
    ----------
    n_beams : int
        Square number of beams (1, 4, 64 for the band presets).
    apothem : float
        Cell apothem (half the inter-site distance).
    height_above_site : float
        Aircraft altitude minus antenna height.
    """
    beams = []
    for i, poly in enumerate(beam_regions(n_beams, apothem)):
        _, cx, cy = polygon_area_centroid(poly)
        if abs(cx) < 1e-9 * apothem and abs(cy) < 1e-9 * apothem:
            cx = cy = 0.0
        zen = math.atan2(math.hypot(cx, cy), height_above_site)
        az = math.atan2(cy, cx)
        beams.append(Beam(zen, az, i, float(cx), float(cy)))
    return beams


def write_pattern_csv(path: str | Path, beam: Beam, cfg: AntennaArrayConfig,
                      zenith_deg=None, azimuth_deg=None) -> None:
    """Dump ``(zenith_offset_deg, azimuth_deg, gain_dbi)`` rows for plotting."""
    zenith_deg = np.arange(0.0, 90.5, 1.0) if zenith_deg is None else np.asarray(zenith_deg)
    azimuth_deg = np.arange(-180.0, 180.5, 5.0) if azimuth_deg is None else np.asarray(azimuth_deg)
    zz, aa = np.meshgrid(zenith_deg, azimuth_deg, indexing="ij")
    g = beam_gain(np.radians(zz), np.radians(aa), beam, cfg)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["zenith_offset_deg", "azimuth_deg", "gain_dbi"])
        for z, a, v in zip(zz.ravel(), aa.ravel(), g.ravel()):
            w.writerow([f"{z:.6g}", f"{a:.6g}", f"{v:.6f}"])
