"""
Scenario definition, band presets and the plain-text scenario file format.

A scenario file is a sequence of ``[section]`` headers followed by
``key = value`` lines, ``#`` starting a comment.  Four sections are
recognised: ``[band]``, ``[deployment]``, ``[radio]`` and ``[simulation]``.
Values are in SI base units (Hz, m, W) except noise figures and shadowing,
which are in dB.  Example::

    [band]
    band = low

    [deployment]
    isd = 80000
    rings = 2

    [simulation]
    ru_levels = 0.003, 0.2, 0.79, 1.0
    n_drops = 10000
    seed = 1

Keys left out fall back to the defaults of :class:`Scenario`; keys in the
``[band]`` section other than ``band`` override single fields of the
chosen preset.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

__all__ = [
    "AntennaArrayConfig",
    "BandPreset",
    "Scenario",
    "ScenarioError",
    "BAND_NAMES",
    "STEERING_MODES",
    "DL_POWER_MODES",
    "preset",
    "load_scenario",
    "loads_scenario",
    "dumps_scenario",
    "save_scenario",
    "preset_path",
]

BAND_NAMES = ("low", "mid", "high")
STEERING_MODES = ("grid_of_beams", "genie_location")
DL_POWER_MODES = ("split", "single_beam")


class ScenarioError(ValueError):
    """Raised for malformed scenario files and violated invariants."""


@dataclass(frozen=True)
class AntennaArrayConfig:
    """Sky-facing uniform planar array with TR 38.901 elements.

    ``m_rows`` elements are laid along the global x axis with spacing
    ``element_spacing_v`` and ``n_cols`` along the y axis with spacing
    ``element_spacing_h`` (both in wavelengths).
    """

    m_rows: int = 1
    n_cols: int = 1
    polarizations: int = 1
    element_spacing_v: float = 0.5
    element_spacing_h: float = 0.5
    element_max_gain: float = 8.0
    beamwidth_3db: float = 65.0
    sla_v: float = 30.0
    a_max: float = 30.0

    def __post_init__(self) -> None:
        if self.m_rows < 1 or self.n_cols < 1:
            raise ScenarioError("array dimensions M, N must be >= 1")
        if self.polarizations not in (1, 2):
            raise ScenarioError("polarizations must be 1 or 2")
        if self.element_spacing_v <= 0 or self.element_spacing_h <= 0:
            raise ScenarioError("element spacing must be > 0")
        if self.beamwidth_3db <= 0:
            raise ScenarioError("beamwidth_3db must be > 0")

    @property
    def n_elements(self) -> int:
        """Elements per polarization."""
        return self.m_rows * self.n_cols


@dataclass(frozen=True)
class BandPreset:
    name: str
    carrier_frequency: float
    bandwidth_per_direction: float
    array: AntennaArrayConfig
    beams_per_cell: int

    def __post_init__(self) -> None:
        if self.carrier_frequency <= 0 or self.bandwidth_per_direction <= 0:
            raise ScenarioError("carrier and bandwidth must be > 0")
        if self.beams_per_cell < 1:
            raise ScenarioError("beams_per_cell must be >= 1")


_PRESETS = {
    "low": BandPreset("low", 700e6, 10e6, AntennaArrayConfig(2, 2, 2), 1),
    "mid": BandPreset("mid", 3.5e9, 100e6, AntennaArrayConfig(4, 4, 2), 4),
    "high": BandPreset("high", 28e9, 400e6, AntennaArrayConfig(8, 8, 2), 64),
}


def preset(name: str) -> BandPreset:
    """Return the band preset ``low``, ``mid`` or ``high``."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise ScenarioError(
            f"unknown band {name!r}; expected one of {', '.join(BAND_NAMES)}"
        ) from None


@dataclass(frozen=True)
class Scenario:
    """Full parameterization of one study.

    Link-model constants (``link_alpha``, ``link_se_max``, ``link_sinr_min``,
    ``sharing_factor``) are per-band calibration values and live in the
    preset files.

    ``dl_power_mode`` selects how a site spends its DL power: ``split``
    gives every beam ``gs_total_tx_power / beams_per_cell`` with each
    interfering beam active independently, ``single_beam`` puts the full
    power into one beam per site (active with probability RU, pointing at
    a random beam of its grid).
    """

    band: BandPreset = field(default_factory=lambda: preset("low"))
    isd: float = 80_000.0
    rings: int = 2
    gs_antenna_height: float = 35.0
    aircraft_altitude: float = 12_000.0
    wrap_around: bool = True
    gs_total_tx_power: float = 80.0
    ue_tx_power: float = 0.2
    ue_antenna_count: int = 2
    gs_noise_figure: float = 5.0
    ue_noise_figure: float = 9.0
    feeder_loss: float = 0.0
    shadowing_std: float = 0.0
    link_alpha: float = 0.75
    link_se_max: float = 4.6
    link_sinr_min: float = -10.0
    sharing_factor: float = 1.0
    ru_levels: tuple[float, ...] = (0.003, 0.2, 0.79, 1.0)
    n_drops: int = 10_000
    seed: int = 1
    steering_mode: str = "grid_of_beams"
    dl_power_mode: str = "split"

    def __post_init__(self) -> None:
        object.__setattr__(self, "ru_levels", tuple(float(r) for r in self.ru_levels))
        if not self.isd > 0:
            raise ScenarioError("isd must be > 0")
        if self.rings < 0:
            raise ScenarioError("rings must be >= 0")
        if not self.aircraft_altitude > self.gs_antenna_height:
            raise ScenarioError("aircraft_altitude must exceed gs_antenna_height")
        if not self.ru_levels:
            raise ScenarioError("ru_levels must not be empty")
        for ru in self.ru_levels:
            if not 0.0 <= ru <= 1.0:
                raise ScenarioError(f"ru out of [0,1]: {ru}")
        if self.n_drops < 1:
            raise ScenarioError("n_drops must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be a 64-bit unsigned integer")
        if self.steering_mode not in STEERING_MODES:
            raise ScenarioError(f"unknown steering_mode {self.steering_mode!r}")
        if self.dl_power_mode not in DL_POWER_MODES:
            raise ScenarioError(f"unknown dl_power_mode {self.dl_power_mode!r}")
        if self.gs_total_tx_power <= 0 or self.ue_tx_power <= 0:
            raise ScenarioError("transmit powers must be > 0")
        if self.ue_antenna_count < 1:
            raise ScenarioError("ue_antenna_count must be >= 1")
        if self.shadowing_std < 0:
            raise ScenarioError("shadowing_std must be >= 0")
        if not 0.0 <= self.sharing_factor <= 1.0:
            raise ScenarioError("sharing_factor must lie in [0,1]")
        if self.link_alpha <= 0 or self.link_se_max <= 0:
            raise ScenarioError("link_alpha and link_se_max must be > 0")

    @property
    def wavelength(self) -> float:
        from .channel import SPEED_OF_LIGHT

        return SPEED_OF_LIGHT / self.band.carrier_frequency

    def with_overrides(self, **overrides: Any) -> "Scenario":
        """Copy with fields replaced; band and array keys are accepted too.

        String values are parsed as they would be in a scenario file.
        """
        top: dict[str, Any] = {}
        band_kw: dict[str, Any] = {}
        array_kw: dict[str, Any] = {}
        base_band = self.band
        for key, value in overrides.items():
            if key == "band":
                base_band = preset(value) if isinstance(value, str) else value
            elif key in _BAND_FIELDS:
                band_kw[key] = _coerce(key, value)
            elif key in _ARRAY_FIELDS:
                array_kw[key] = _coerce(key, value)
            elif key in _SCENARIO_FIELDS:
                top[key] = _coerce(key, value)
            else:
                raise ScenarioError(f"unknown key {key!r}")
        if array_kw:
            band_kw["array"] = dataclasses.replace(base_band.array, **array_kw)
        band = dataclasses.replace(base_band, **band_kw) if band_kw else base_band
        return dataclasses.replace(self, band=band, **top)


# key -> section, in file order
_SECTIONS: dict[str, tuple[str, ...]] = {
    "band": (
        "band", "carrier_frequency", "bandwidth_per_direction", "beams_per_cell",
        "m_rows", "n_cols", "polarizations", "element_spacing_v",
        "element_spacing_h", "element_max_gain", "beamwidth_3db", "sla_v", "a_max",
    ),
    "deployment": (
        "isd", "rings", "gs_antenna_height", "aircraft_altitude", "wrap_around",
    ),
    "radio": (
        "gs_total_tx_power", "ue_tx_power", "ue_antenna_count", "gs_noise_figure",
        "ue_noise_figure", "feeder_loss", "shadowing_std", "link_alpha",
        "link_se_max", "link_sinr_min", "sharing_factor",
    ),
    "simulation": ("ru_levels", "n_drops", "seed", "steering_mode", "dl_power_mode"),
}
_BAND_FIELDS = ("carrier_frequency", "bandwidth_per_direction", "beams_per_cell")
_ARRAY_FIELDS = tuple(f.name for f in dataclasses.fields(AntennaArrayConfig))
_SCENARIO_FIELDS = tuple(f.name for f in dataclasses.fields(Scenario) if f.name != "band")
_INT_KEYS = {"rings", "ue_antenna_count", "n_drops", "seed", "beams_per_cell",
             "m_rows", "n_cols", "polarizations"}
_BOOL_KEYS = {"wrap_around"}
_STR_KEYS = {"steering_mode", "dl_power_mode", "band"}


def _coerce(key: str, value: Any) -> Any:
    if not isinstance(value, str):
        return tuple(value) if key == "ru_levels" else value
    text = value.strip()
    try:
        if key == "ru_levels":
            return tuple(float(v) for v in text.split(",") if v.strip())
        if key in _BOOL_KEYS:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if key in _INT_KEYS:
            number = float(text)
            if number != int(number):
                raise ValueError(text)
            return int(text) if text.lstrip("-").isdigit() else int(number)
        if key in _STR_KEYS:
            return text
        return float(text)
    except ValueError:
        raise ScenarioError(f"invalid value for {key!r}: {value!r}") from None


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        delimiters=("=",),
        interpolation=None,
        default_section="__unused__",
    )
    cp.optionxform = str  # keep key case, then reject anything unexpected
    return cp


def loads_scenario(text: str, source: str = "<string>") -> Scenario:
    """Parse and validate scenario text."""
    cp = _parser()
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}: expected a [section] header") from None
    except configparser.DuplicateOptionError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}: duplicate key {exc.option!r}") from None
    except configparser.DuplicateSectionError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}: duplicate section [{exc.section}]") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ScenarioError(f"{source}:{lineno}: cannot parse {line.strip()!r}") from None

    values: dict[str, Any] = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ScenarioError(f"{source}: unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SECTIONS[section]:
                raise ScenarioError(f"{source}: unknown key {key!r} in [{section}]")
            values[key] = raw

    band_name = values.pop("band", "low").strip()
    try:
        return Scenario(band=preset(band_name)).with_overrides(**values)
    except ScenarioError as exc:
        raise ScenarioError(f"{source}: {exc}") from None


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario file, raising :class:`ScenarioError` on any problem."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return loads_scenario(text, source=str(path))


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def dumps_scenario(scn: Scenario) -> str:
    """Serialize every field; ``loads_scenario(dumps_scenario(s)) == s``."""
    flat: dict[str, Any] = {"band": scn.band.name}
    flat.update({k: getattr(scn.band, k) for k in _BAND_FIELDS})
    flat.update({k: getattr(scn.band.array, k) for k in _ARRAY_FIELDS})
    flat.update({k: getattr(scn, k) for k in _SCENARIO_FIELDS})
    lines = []
    for section, keys in _SECTIONS.items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {_fmt(flat[k])}" for k in keys)
        lines.append("")
    return "\n".join(lines)


def save_scenario(scn: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps_scenario(scn))


def preset_path(name: str) -> Path:
    """Path of a shipped preset file (``low``, ``mid`` or ``high``)."""
    preset(name)
    return Path(str(resources.files("nra2g") / "presets" / f"{name}.scn"))
