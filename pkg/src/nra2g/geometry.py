"""
Hexagonal multi-site layout, wrap-around and link geometry.

Sites sit on a triangular lattice with nearest-neighbour spacing ``isd``;
each site's cell is the Voronoi hexagon around it (flat sides towards the
neighbours, apothem ``isd/2``).  The whole cluster of ``1 + 3r(r+1)`` cells
tiles the plane under six translation vectors, which gives the usual
7-image wrap-around.  Earth curvature is ignored.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SitePosition",
    "AircraftPosition",
    "LinkGeometry",
    "HexLayout",
    "hex_layout",
    "n_sites_for_rings",
    "link_geometry",
    "wrap_distance",
    "uniform_in_hexagon",
    "drop_aircraft",
    "write_layout_csv",
]

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SitePosition:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class AircraftPosition:
    x: float
    y: float
    z: float
    heading: float = 0.0
    speed: float = 0.0


@dataclass(frozen=True)
class LinkGeometry:
    slant_range: float
    zenith_offset: float
    azimuth: float
    horizontal_distance: float


def n_sites_for_rings(rings: int) -> int:
    return 1 + 3 * rings * (rings + 1)


def _axial_coords(rings: int) -> list[tuple[int, int]]:
    # ring by ring, counter-clockwise starting on the +x axis
    coords = [(0, 0)]
    directions = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)]
    for ring in range(1, rings + 1):
        q, r = ring, 0
        for dq, dr in directions:
            for _ in range(ring):
                coords.append((q, r))
                q, r = q + dq, r + dr
    return coords


class HexLayout:
    """Hex cluster of sites with optional wrap-around.

    Parameters
    ----------
    isd : float
        Inter-site distance in metres.
    rings : int
        Number of rings around the centre site (2 gives 19 sites).
    height : float
        Antenna height of every site.
    wrap : bool
        Use the nearest of the 7 cluster images for every link.
    """

    def __init__(self, isd: float, rings: int, height: float = 0.0, wrap: bool = True):
        if isd <= 0:
            raise ValueError("isd must be > 0")
        if rings < 0:
            raise ValueError("rings must be >= 0")
        self.isd = float(isd)
        self.rings = int(rings)
        self.height = float(height)
        self.wrap = bool(wrap)

        e1 = np.array([1.0, 0.0]) * self.isd
        e2 = np.array([0.5, SQRT3 / 2]) * self.isd
        qr = np.array(_axial_coords(self.rings), dtype=float)
        self.xy = qr[:, :1] * e1 + qr[:, 1:] * e2
        # exact zero at the origin keeps the centre-site geometry clean
        self.xy[0] = 0.0

        shift = (self.rings + 1) * e1 + self.rings * e2
        angles = np.arange(6) * np.pi / 3
        rot = np.stack([np.cos(angles), -np.sin(angles), np.sin(angles), np.cos(angles)], -1)
        rot = rot.reshape(6, 2, 2)
        self.translations = np.vstack([np.zeros(2), rot @ shift])

    @classmethod
    def from_scenario(cls, scn) -> "HexLayout":
        return cls(scn.isd, scn.rings, scn.gs_antenna_height, scn.wrap_around)

    @property
    def n_sites(self) -> int:
        return len(self.xy)

    @property
    def cell_apothem(self) -> float:
        return self.isd / 2

    @property
    def cell_radius(self) -> float:
        """Circumradius of one hexagonal cell."""
        return self.isd / SQRT3

    @property
    def cell_area(self) -> float:
        return SQRT3 / 2 * self.isd**2

    def sites(self) -> list[SitePosition]:
        return [SitePosition(float(x), float(y), self.height) for x, y in self.xy]

    def offsets(self, target_xy: np.ndarray) -> np.ndarray:
        """Horizontal vectors from every site to the targets.

        ``target_xy`` has shape ``(..., 2)``; the result has shape
        ``(..., n_sites, 2)``.  With wrap-around each vector points to the
        nearest of the 7 images of the target.
        """
        d = np.asarray(target_xy, dtype=float)[..., None, :] - self.xy
        return self.nearest_image(d)

    def nearest_image(self, d: np.ndarray) -> np.ndarray:
        """Shortest wrap-around image of displacement vectors ``(..., 2)``."""
        d = np.asarray(d, dtype=float)
        if not self.wrap:
            return d
        images = d[..., None, :] + self.translations
        k = np.argmin(np.einsum("...i,...i->...", images, images), axis=-1)
        return np.take_along_axis(images, k[..., None, None], axis=-2)[..., 0, :]

    @classmethod
    def from_points(cls, xy, cell_apothem: float, height: float = 0.0) -> "HexLayout":
        """Unwrapped layout with explicit site positions (toy set-ups)."""
        layout = cls(2 * cell_apothem, 0, height, wrap=False)
        layout.xy = np.array(xy, dtype=float).reshape(-1, 2)
        return layout


def hex_layout(isd: float, rings: int, height: float = 0.0) -> list[SitePosition]:
    """Sites of a hex cluster; the centre site is at the origin."""
    return HexLayout(isd, rings, height).sites()


def link_geometry(dx, dy, dz):
    """Slant range, zenith offset and azimuth of the vector (dx, dy, dz).

    Works elementwise on arrays; returns a tuple of arrays
    ``(slant_range, zenith_offset, azimuth, horizontal_distance)``.
    """
    horiz = np.hypot(dx, dy)
    slant = np.hypot(horiz, dz)
    zenith = np.arctan2(horiz, dz)
    azimuth = np.arctan2(dy, dx)
    return slant, zenith, azimuth, horiz


def wrap_distance(a, b, layout: HexLayout) -> LinkGeometry:
    """Geometry from position ``a`` to the nearest wrap-around image of ``b``.

    Positions are ``(x, y, z)`` sequences or objects with ``x, y, z``.
    """
    a = _xyz(a)
    b = _xyz(b)
    d = layout.nearest_image(b[:2] - a[:2])
    slant, zen, az, horiz = link_geometry(d[0], d[1], b[2] - a[2])
    return LinkGeometry(float(slant), float(zen), float(az), float(horiz))


def _xyz(p) -> np.ndarray:
    if hasattr(p, "x"):
        return np.array([p.x, p.y, p.z], dtype=float)
    return np.asarray(p, dtype=float)


def uniform_in_hexagon(u: np.ndarray, apothem: float) -> np.ndarray:
    """Map uniform draws to points uniform in a site-centred hexagon.

    ``u`` has shape ``(..., 3)`` with entries in [0, 1): the first picks one
    of three rhombi that make up the hexagon, the other two are the rhombus
    coordinates.  Returns offsets of shape ``(..., 2)``.
    """
    u = np.asarray(u, dtype=float)
    radius = 2 * apothem / SQRT3
    k = np.minimum((u[..., 0] * 3).astype(int), 2)
    a0 = np.pi / 6 + k * (2 * np.pi / 3)
    a1 = a0 + 2 * np.pi / 3
    va = radius * np.stack([np.cos(a0), np.sin(a0)], -1)
    vb = radius * np.stack([np.cos(a1), np.sin(a1)], -1)
    return u[..., 1:2] * va + u[..., 2:3] * vb


def drop_points(layout: HexLayout, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` horizontal positions uniform over the union of all cells."""
    site = rng.integers(layout.n_sites, size=n)
    offs = uniform_in_hexagon(rng.random((n, 3)), layout.cell_apothem)
    return layout.xy[site] + offs


def drop_aircraft(layout: HexLayout, n: int, rng: np.random.Generator,
                  altitude: float = 12_000.0, speed: float = 0.0) -> list[AircraftPosition]:
    """Uniform i.i.d. aircraft drops over the cluster at a fixed altitude."""
    if n < 1:
        raise ValueError("n must be >= 1")
    xy = drop_points(layout, n, rng)
    heading = rng.uniform(0.0, 2 * np.pi, size=n)
    return [AircraftPosition(float(x), float(y), float(altitude), float(h), float(speed))
            for (x, y), h in zip(xy, heading)]


def write_layout_csv(layout: HexLayout, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["site_id", "x", "y", "z"])
        for i, s in enumerate(layout.sites()):
            w.writerow([i, repr(s.x), repr(s.y), repr(s.z)])

