import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nra2g.antenna import (
    Beam,
    array_factor_db,
    beam_gain,
    beam_grid,
    beam_regions,
    element_gain,
    panel_element_gain,
    polygon_area_centroid,
    sky_panel_angles,
    write_pattern_csv,
)
from nra2g.scenario import AntennaArrayConfig, preset

CFG = AntennaArrayConfig()
ARR22 = preset("low").array
ARR88 = preset("high").array
HEX_AREA = 2 * math.sqrt(3)  # unit apothem


def _af_oracle(obs_zen, obs_az, st_zen, st_az, cfg):
    """Explicit complex sum over elements, power-normalized."""
    m = np.arange(cfg.m_rows)[:, None]
    n = np.arange(cfg.n_cols)[None, :]
    du = math.sin(obs_zen) * math.cos(obs_az) - math.sin(st_zen) * math.cos(st_az)
    dv = math.sin(obs_zen) * math.sin(obs_az) - math.sin(st_zen) * math.sin(st_az)
    phase = 2 * np.pi * (m * cfg.element_spacing_v * du + n * cfg.element_spacing_h * dv)
    af = np.exp(1j * phase).sum()
    return 10 * math.log10(max(abs(af) ** 2 / cfg.n_elements, 1e-300))


def test_element_boresight():
    assert element_gain(0.0, 0.0, CFG) == 8.0


def test_element_3db_point():
    assert element_gain(math.radians(32.5), 0.0, CFG) == pytest.approx(5.0)
    assert element_gain(0.0, math.radians(32.5), CFG) == pytest.approx(5.0)


def test_element_floor():
    assert element_gain(math.radians(90), math.radians(180), CFG) == pytest.approx(-22.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_element_symmetry_and_range(th, ph):
    g = element_gain(th, ph, CFG)
    assert -22.0 <= g <= 8.0
    assert element_gain(-th, ph, CFG) == g
    assert element_gain(th, -ph, CFG) == g


def test_sky_panel_mapping():
    # straight up is panel boresight; along x tilts vertically, along y horizontally
    assert sky_panel_angles(0.0, 0.0) == (0.0, 0.0)
    v, h = sky_panel_angles(math.radians(30), 0.0)
    assert (math.degrees(v), h) == (pytest.approx(30), pytest.approx(0))
    v, h = sky_panel_angles(math.radians(30), math.pi / 2)
    assert (v, math.degrees(h)) == (pytest.approx(0, abs=1e-12), pytest.approx(30))
    assert panel_element_gain(0.0, 1.234, CFG) == 8.0


def test_boresight_array_gain():
    assert beam_gain(0.0, 0.0, Beam(0.0, 0.0), ARR22) == pytest.approx(8 + 10 * math.log10(4))
    assert beam_gain(0.0, 0.0, Beam(0.0, 0.0), ARR88) == pytest.approx(26.0618, abs=1e-4)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, math.radians(89)), st.floats(-math.pi, math.pi),
       st.sampled_from([ARR22, preset("mid").array, ARR88]))
def test_gain_at_steering_direction_exact(zen, az, cfg):
    g = beam_gain(zen, az, (zen, az), cfg)
    assert g == pytest.approx(panel_element_gain(zen, az, cfg) + 10 * math.log10(cfg.n_elements),
                              abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, math.pi / 2), st.floats(-math.pi, math.pi),
       st.floats(0, math.pi / 2), st.floats(-math.pi, math.pi),
       st.sampled_from([ARR22, ARR88, AntennaArrayConfig(3, 5)]))
def test_array_factor_matches_complex_sum(oz, oa, sz, sa, cfg):
    ours = float(array_factor_db(oz, oa, sz, sa, cfg))
    ref = _af_oracle(oz, oa, sz, sa, cfg)
    if ref > -60:
        assert ours == pytest.approx(ref, abs=1e-6)
    else:
        assert ours < -55


def test_two_element_null():
    cfg = AntennaArrayConfig(2, 1)
    # sin-space offset 1/(2*spacing) = 1 along the row axis: horizon along x
    assert array_factor_db(math.pi / 2, 0.0, 0.0, 0.0, cfg) <= -60


def _random_dirs(rng, n):
    return np.arccos(rng.random(n)), rng.uniform(-math.pi, math.pi, n)


@pytest.mark.parametrize("band", ["low", "mid", "high"])
def test_argmax_at_steering_array_factor(band):
    p = preset(band)
    rng = np.random.default_rng(11)
    for beam in beam_grid(p.beams_per_cell, 40e3, 11_965):
        z, a = _random_dirs(rng, 1000)
        af = array_factor_db(z, a, beam.steer_zenith_offset, beam.steer_azimuth, p.array)
        assert af.max() <= 10 * math.log10(p.array.n_elements) + 1e-9


@pytest.mark.parametrize("band", ["low", "mid", "high"])
def test_argmax_at_steering_zenith_beam(band):
    cfg = preset(band).array
    z, a = _random_dirs(np.random.default_rng(5), 1000)
    g = beam_gain(z, a, Beam(0.0, 0.0), cfg)
    assert g.max() <= beam_gain(0.0, 0.0, Beam(0.0, 0.0), cfg)


def test_off_zenith_peak_pulled_towards_boresight():
    # the element taper moves the total-gain peak of a steered beam towards zenith
    beam = Beam(math.radians(66), 0.0)
    steer = beam_gain(beam.steer_zenith_offset, 0.0, beam, preset("mid").array)
    toward = beam_gain(math.radians(50), 0.0, beam, preset("mid").array)
    assert toward > steer


def test_hemisphere_average_closed_form():
    # solid-angle mean of |AF|^2/MN for a zenith-steered 2x2 half-wave array:
    # 1 + sinc(pi*sqrt(2)) from the four diagonal pairs
    th = np.linspace(0, math.pi / 2, 1801)
    ph = np.linspace(-math.pi, math.pi, 1441)[:-1]
    T, P = np.meshgrid(th, ph, indexing="ij")
    af = 10 ** (array_factor_db(T, P, 0.0, 0.0, ARR22) / 10)
    w = np.sin(T)
    mean_db = 10 * math.log10((af * w).sum() / w.sum())
    x = math.pi * math.sqrt(2)
    assert mean_db == pytest.approx(10 * math.log10(1 + math.sin(x) / x), abs=0.01)


def test_hemisphere_average_within_one_db():
    th = np.linspace(0, math.pi / 2, 901)
    ph = np.linspace(-math.pi, math.pi, 721)[:-1]
    T, P = np.meshgrid(th, ph, indexing="ij")
    lin = 10 ** ((beam_gain(T, P, Beam(0.0, 0.0), ARR22) - panel_element_gain(T, P, ARR22)) / 10)
    w = np.sin(T)
    assert abs(10 * math.log10((lin * w).sum() / w.sum())) <= 1.0


@pytest.mark.parametrize("n", [1, 4, 9, 16, 64])
def test_beam_regions_equal_area(n):
    regions = beam_regions(n, 1.0)
    assert len(regions) == n
    areas = [polygon_area_centroid(r)[0] for r in regions]
    np.testing.assert_allclose(areas, HEX_AREA / n, rtol=1e-9)
    assert sum(areas) == pytest.approx(HEX_AREA)


def test_regions_tile_the_hexagon():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1.15, 1.15, (4000, 2))
    normals = np.array([[math.cos(a), math.sin(a)] for a in np.arange(6) * math.pi / 3])
    inside = np.all(pts @ normals.T < 1.0 - 1e-6, axis=1)
    regions = beam_regions(16, 1.0)

    def contains(poly, p):
        # even-odd ray cast
        poly = np.asarray(poly)
        x, y = p
        c = False
        for (x1, y1), (x2, y2) in zip(poly, np.roll(poly, -1, axis=0)):
            if (y1 > y) != (y2 > y) and x < (x2 - x1) * (y - y1) / (y2 - y1) + x1:
                c = not c
        return c

    for p in pts[inside][:500]:
        assert sum(contains(r, p) for r in regions) == 1


def test_single_beam_points_at_zenith():
    (b,) = beam_grid(1, 40e3, 11_965)
    assert (b.steer_zenith_offset, b.aim_x, b.aim_y) == (0.0, 0.0, 0.0)


def test_four_beam_grid():
    beams = beam_grid(4, 40e3, 11_965)
    assert [b.index for b in beams] == [0, 1, 2, 3]
    assert beams[0].steer_zenith_offset == 0.0
    zen = [b.steer_zenith_offset for b in beams[1:]]
    np.testing.assert_allclose(zen, zen[0])
    az = sorted(math.degrees(b.steer_azimuth) % 360 for b in beams[1:])
    np.testing.assert_allclose(np.diff(az), 120, atol=1e-9)


def test_sixty_four_beams_in_upper_hemisphere():
    beams = beam_grid(64, 40e3, 11_965)
    assert len(beams) == 64
    assert all(0 <= b.steer_zenith_offset < math.pi / 2 for b in beams)


@pytest.mark.parametrize("n", [2, 3, 5, 63, 0])
def test_non_square_rejected(n):
    with pytest.raises(ValueError):
        beam_grid(n, 1.0, 1.0)


def test_pattern_csv(tmp_path):
    path = tmp_path / "cut.csv"
    write_pattern_csv(path, Beam(0.0, 0.0), ARR22, zenith_deg=[0, 45], azimuth_deg=[0])
    lines = path.read_text().splitlines()
    assert lines[0] == "zenith_offset_deg,azimuth_deg,gain_dbi"
    assert float(lines[1].split(",")[2]) == pytest.approx(14.0206, abs=1e-4)
