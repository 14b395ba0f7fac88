import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from nra2g.scenario import (
    BAND_NAMES,
    Scenario,
    ScenarioError,
    dumps_scenario,
    load_scenario,
    loads_scenario,
    preset,
    preset_path,
)


@pytest.mark.parametrize("name, f, bw, mnp, beams", [
    ("low", 700e6, 10e6, (2, 2, 2), 1),
    ("mid", 3.5e9, 100e6, (4, 4, 2), 4),
    ("high", 28e9, 400e6, (8, 8, 2), 64),
])
def test_preset_values(name, f, bw, mnp, beams):
    p = preset(name)
    assert p.name == name
    assert p.carrier_frequency == f
    assert p.bandwidth_per_direction == bw
    assert (p.array.m_rows, p.array.n_cols, p.array.polarizations) == mnp
    assert p.beams_per_cell == beams
    a = p.array
    assert (a.element_max_gain, a.beamwidth_3db, a.sla_v, a.a_max) == (8.0, 65.0, 30.0, 30.0)
    assert (a.element_spacing_v, a.element_spacing_h) == (0.5, 0.5)


def test_unknown_preset():
    with pytest.raises(ScenarioError, match="unknown band"):
        preset("ultra")


def test_defaults():
    s = Scenario()
    assert (s.isd, s.rings, s.gs_antenna_height, s.aircraft_altitude) == (80e3, 2, 35.0, 12e3)
    assert (s.gs_total_tx_power, s.ue_tx_power, s.ue_antenna_count) == (80.0, 0.2, 2)
    assert (s.gs_noise_figure, s.ue_noise_figure) == (5.0, 9.0)
    assert s.feeder_loss == 0.0 and s.shadowing_std == 0.0
    assert s.steering_mode == "grid_of_beams"
    assert s.dl_power_mode == "split"


def test_load_low_band_file(tmp_path):
    path = tmp_path / "s.scn"
    path.write_text("[band]\nband = low\n[deployment]\nisd = 80000\nrings = 2\n")
    s = load_scenario(path)
    assert s.band == preset("low")
    assert s.isd == 80000 and s.rings == 2
    assert s.gs_antenna_height == 35 and s.aircraft_altitude == 12000


def test_missing_noise_figure_uses_default():
    s = loads_scenario("[radio]\nue_noise_figure = 7\n")
    assert s.gs_noise_figure == 5.0
    assert s.ue_noise_figure == 7.0


def test_ru_out_of_range():
    with pytest.raises(ScenarioError, match=r"ru out of \[0,1\]"):
        loads_scenario("[simulation]\nru_levels = 0.2, 1.5\n")


def test_unknown_key_rejected():
    with pytest.raises(ScenarioError, match="unknown key 'colour'"):
        loads_scenario("[radio]\ncolour = blue\n")


def test_key_in_wrong_section_rejected():
    with pytest.raises(ScenarioError, match="unknown key 'isd'"):
        loads_scenario("[radio]\nisd = 5\n")


def test_unknown_section_rejected():
    with pytest.raises(ScenarioError, match="unknown section"):
        loads_scenario("[extras]\nx = 1\n")


def test_parse_error_has_line_number():
    with pytest.raises(ScenarioError, match=r"<string>:3"):
        loads_scenario("[radio]\n# fine\nthis line has no equals\n")


def test_missing_section_header_has_line_number():
    with pytest.raises(ScenarioError, match=r":1: expected a \[section\]"):
        loads_scenario("isd = 5\n")


def test_bad_number():
    with pytest.raises(ScenarioError, match="invalid value for 'isd'"):
        loads_scenario("[deployment]\nisd = far\n")


@pytest.mark.parametrize("text, msg", [
    ("[deployment]\nisd = 0\n", "isd must be > 0"),
    ("[deployment]\naircraft_altitude = 30\n", "aircraft_altitude"),
    ("[simulation]\nn_drops = 0\n", "n_drops"),
    ("[simulation]\nsteering_mode = psychic\n", "steering_mode"),
    ("[simulation]\ndl_power_mode = boost\n", "dl_power_mode"),
    ("[radio]\nsharing_factor = 2\n", "sharing_factor"),
])
def test_invariant_violations(text, msg):
    with pytest.raises(ScenarioError, match=msg):
        loads_scenario(text)


def test_inline_comments_and_band_override():
    s = loads_scenario("[band]\nband = mid  # 3.5 GHz\nbeams_per_cell = 16\nm_rows = 8\n")
    assert s.band.name == "mid"
    assert s.band.beams_per_cell == 16
    assert s.band.array.m_rows == 8 and s.band.array.n_cols == 4


def test_missing_file():
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario("/nonexistent/file.scn")


@pytest.mark.parametrize("name", BAND_NAMES)
def test_shipped_presets_load_and_round_trip(name):
    s = load_scenario(preset_path(name))
    assert s.band == preset(name)
    assert loads_scenario(dumps_scenario(s)) == s


_floats = st.floats(min_value=0.01, max_value=1e6, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    band=st.sampled_from(BAND_NAMES),
    isd=st.floats(min_value=1.0, max_value=5e5),
    rings=st.integers(0, 5),
    alt=st.floats(min_value=100.0, max_value=2e4),
    power=_floats,
    nf=st.floats(min_value=0, max_value=20),
    rus=st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=6),
    seed=st.integers(0, 2**64 - 1),
    mode=st.sampled_from(["grid_of_beams", "genie_location"]),
    wrap=st.booleans(),
)
def test_round_trip_property(band, isd, rings, alt, power, nf, rus, seed, mode, wrap):
    s = Scenario(band=preset(band), isd=isd, rings=rings, aircraft_altitude=alt,
                 gs_total_tx_power=power, gs_noise_figure=nf, ru_levels=tuple(rus),
                 seed=seed, steering_mode=mode, wrap_around=wrap)
    assert loads_scenario(dumps_scenario(s)) == s


def test_with_overrides_strings_and_values():
    s = Scenario().with_overrides(isd="160000", band="high", n_cols=4, ru_levels="0.1, 0.5")
    assert s.isd == 160000.0
    assert s.band.name == "high" and s.band.array.n_cols == 4 and s.band.array.m_rows == 8
    assert s.ru_levels == (0.1, 0.5)
    with pytest.raises(ScenarioError):
        Scenario().with_overrides(nonsense=1)


def test_scenario_is_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        Scenario().isd = 5
