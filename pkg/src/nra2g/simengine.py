"""
Monte Carlo snapshot engine for downlink and uplink SINR and user throughput.

Every drop owns an independent random stream derived from ``(seed, drop_id)``
and consumes a fixed set of draws (aircraft position, per-beam and per-cell
activity uniforms, interferer positions, shadowing), whatever the RU levels
or steering mode.  The same draws are reused for every RU level, so raising
RU only ever adds interferers.  Drops are evaluated in fixed-size chunks;
workers only distribute chunks, so results do not depend on the worker
count.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import antenna
from .channel import dbm_to_watt, free_space_path_loss, noise_power, watt_to_dbm
from .geometry import HexLayout, link_geometry, uniform_in_hexagon
from .scenario import Scenario

__all__ = [
    "DL",
    "UL",
    "QUANTILES",
    "LinkSample",
    "PercentileReport",
    "Network",
    "DropDraws",
    "drop_rng",
    "draw_drops",
    "serve",
    "sinr_snapshot",
    "throughput",
    "percentile",
    "run",
    "SimResult",
]

DL, UL = "DL", "UL"
QUANTILES = (5, 50, 90, 99, 100)
CHUNK = 500
GENIE_BEAM = -1


@dataclass(frozen=True)
class LinkSample:
    drop_id: int
    direction: str
    ru: float
    serving_site: int
    serving_beam: int
    sinr: float
    snr: float
    throughput: float


@dataclass(frozen=True)
class PercentileReport:
    direction: str
    ru: float
    percentiles: dict
    metric: str = "throughput"


def percentile(samples: Sequence[float], q: float) -> float:
    """Nearest-rank percentile: the ceil(q/100 * n)-th smallest sample."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("percentile of an empty sample")
    if not 0 <= q <= 100:
        raise ValueError("q must lie in [0, 100]")
    rank = max(math.ceil(q / 100 * x.size - 1e-9), 1)
    return float(x[rank - 1])


def throughput(sinr, bandwidth: float, ru: float, alpha: float = 0.75,
               se_max: float = 4.6, sinr_min: float = -10.0,
               sharing_factor: float = 1.0):
    """Truncated-Shannon user rate in bit/s.

    ``(1 - ru*sharing_factor) * bandwidth * min(alpha*log2(1+sinr), se_max)``,
    zero below ``sinr_min`` (dB).
    """
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    if not 0 <= ru <= 1:
        raise ValueError("ru must lie in [0, 1]")
    s = np.asarray(sinr, dtype=float)
    se = np.minimum(alpha * np.log2(1 + 10 ** (s / 10)), se_max)
    rate = (1 - ru * sharing_factor) * bandwidth * np.where(s < sinr_min, 0.0, se)
    return float(rate) if rate.ndim == 0 else rate


class Network:
    """Scenario-derived constants shared by every drop."""

    def __init__(self, scn: Scenario, layout: HexLayout | None = None):
        self.scn = scn
        self.layout = layout if layout is not None else HexLayout.from_scenario(scn)
        self.cfg = scn.band.array
        self.dz = scn.aircraft_altitude - scn.gs_antenna_height
        self.beams = antenna.beam_grid(scn.band.beams_per_cell, self.layout.cell_apothem, self.dz)
        self.steer_zen = np.array([b.steer_zenith_offset for b in self.beams])
        self.steer_az = np.array([b.steer_azimuth for b in self.beams])
        self.n_sites = self.layout.n_sites
        self.n_beams = len(self.beams)
        self.genie = scn.steering_mode == "genie_location"

        self.single_beam = scn.dl_power_mode == "single_beam"
        n_tx = 1 if self.single_beam else scn.band.beams_per_cell
        self.beam_power_dbm = watt_to_dbm(scn.gs_total_tx_power / n_tx)
        self.ue_power_dbm = watt_to_dbm(scn.ue_tx_power)
        self.dl_combining_db = 10 * math.log10(scn.ue_antenna_count)
        self.ul_combining_db = 10 * math.log10(self.cfg.polarizations)
        bw = scn.band.bandwidth_per_direction
        self.noise_dl_w = float(dbm_to_watt(noise_power(bw, scn.ue_noise_figure)))
        self.noise_ul_w = float(dbm_to_watt(noise_power(bw, scn.gs_noise_figure)))
        self.peak_gain_db = 10 * math.log10(self.cfg.n_elements)

    def path_loss(self, slant, shadow_db):
        return (free_space_path_loss(slant, self.scn.band.carrier_frequency)
                + self.scn.feeder_loss + shadow_db)

    def rate(self, sinr_db, ru: float):
        return scenario_rate(self.scn, sinr_db, ru)


def scenario_rate(scn: Scenario, sinr_db, ru: float):
    """:func:`throughput` with the scenario's bandwidth and link constants."""
    return throughput(sinr_db, scn.band.bandwidth_per_direction, ru, scn.link_alpha,
                      scn.link_se_max, scn.link_sinr_min, scn.sharing_factor)


@dataclass
class DropDraws:
    """Random inputs of a batch of drops (leading axis = drop)."""

    drop_id: np.ndarray        # (D,)
    site_u: np.ndarray         # (D,) uniform, picks the aircraft's cell
    hex_u: np.ndarray          # (D, 3) position inside that cell
    dl_active_u: np.ndarray    # (D, S, B)
    dl_aim_u: np.ndarray       # (D, S, B, 3) genie-mode interferer aim points
    ul_active_u: np.ndarray    # (D, S)
    ul_pos_u: np.ndarray       # (D, S, 3)
    shadow_dl: np.ndarray      # (D, S) standard normals, site <-> aircraft
    shadow_ul: np.ndarray      # (D, S) standard normals, interferer -> site
    dl_beam_u: np.ndarray      # (D, S) beam choice of a single-beam interferer

    def __len__(self) -> int:
        return len(self.drop_id)


def drop_rng(seed: int, drop_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(drop_id),)))


def draw_drops(net: Network, drop_ids: Sequence[int]) -> DropDraws:
    S, B = net.n_sites, net.n_beams
    parts = []
    for d in drop_ids:
        rng = drop_rng(net.scn.seed, d)
        parts.append((
            rng.random(), rng.random(3), rng.random((S, B)), rng.random((S, B, 3)),
            rng.random(S), rng.random((S, 3)), rng.standard_normal(S),
            rng.standard_normal(S), rng.random(S),
        ))
    cols = list(zip(*parts)) if parts else [()] * 9
    return DropDraws(np.asarray(drop_ids, dtype=np.int64), *(np.array(c) for c in cols))


def _aircraft_xy(net: Network, draws: DropDraws) -> np.ndarray:
    site = np.minimum((draws.site_u * net.n_sites).astype(int), net.n_sites - 1)
    return net.layout.xy[site] + uniform_in_hexagon(draws.hex_u, net.layout.cell_apothem)


@dataclass
class _Evaluated:
    site: np.ndarray      # (D,)
    beam: np.ndarray      # (D,)
    snr: dict             # direction -> (D,) dB
    sinr: dict            # direction -> (R, D) dB


def _evaluate(net: Network, draws: DropDraws, aircraft_xy: np.ndarray,
              ru_levels: Sequence[float]) -> _Evaluated:
    scn, cfg = net.scn, net.cfg
    D = len(draws)
    S = net.n_sites
    idx = np.arange(D)
    std = scn.shadowing_std

    off = net.layout.offsets(aircraft_xy)                        # (D, S, 2)
    slant, zen, az, _ = link_geometry(off[..., 0], off[..., 1], net.dz)
    pl = net.path_loss(slant, std * draws.shadow_dl)            # (D, S)

    # serving site/beam: strongest received DL power, first index on ties
    if net.genie:
        g_self = antenna.panel_element_gain(zen, az, cfg) + net.peak_gain_db
        score = g_self - pl
        site = np.argmax(score, axis=1)
        beam = np.full(D, GENIE_BEAM)
        g_serv = g_self[idx, site]
        serv_steer = (zen[idx, site], az[idx, site])
        # interfering beams aim at random points in their own cell
        aim = uniform_in_hexagon(draws.dl_aim_u, net.layout.cell_apothem)
        aim_zen = np.arctan2(np.hypot(aim[..., 0], aim[..., 1]), net.dz)
        aim_az = np.arctan2(aim[..., 1], aim[..., 0])
        g_int = antenna.beam_gain(zen[..., None], az[..., None], (aim_zen, aim_az), cfg)
    else:
        g_int = antenna.beam_gain(zen[..., None], az[..., None],
                                  (net.steer_zen, net.steer_az), cfg)  # (D, S, B)
        score = (g_int - pl[..., None]).reshape(D, -1)
        flat = np.argmax(score, axis=1)
        site, beam = np.divmod(flat, net.n_beams)
        g_serv = g_int[idx, site, beam]
        serv_steer = (net.steer_zen[beam], net.steer_az[beam])

    pl_serv = pl[idx, site]
    other = np.ones((D, S), dtype=bool)
    other[idx, site] = False

    # downlink
    s_dl = dbm_to_watt(net.beam_power_dbm + g_serv - pl_serv + net.dl_combining_db)
    i_dl_each = dbm_to_watt(net.beam_power_dbm + g_int - pl[..., None] + net.dl_combining_db)
    i_dl_each = np.where(other[..., None], i_dl_each, 0.0)
    dl_active_u = draws.dl_active_u
    if net.single_beam:
        # one beam per site: the first activity uniform gates it, and in grid
        # mode a separate uniform picks which beam (genie aims are i.i.d.)
        if net.genie:
            pick = np.zeros((D, S), dtype=int)
        else:
            pick = np.minimum((draws.dl_beam_u * net.n_beams).astype(int), net.n_beams - 1)
        i_dl_each = np.take_along_axis(i_dl_each, pick[..., None], axis=2)
        dl_active_u = dl_active_u[..., :1]

    # uplink: one candidate interferer per other cell, measured at the serving beam
    ue_xy = net.layout.xy + uniform_in_hexagon(draws.ul_pos_u, net.layout.cell_apothem)
    d_ul = net.layout.nearest_image(ue_xy - net.layout.xy[site][:, None, :])
    sl_i, zen_i, az_i, _ = link_geometry(d_ul[..., 0], d_ul[..., 1], net.dz)
    g_ul_i = antenna.beam_gain(zen_i, az_i, (serv_steer[0][:, None], serv_steer[1][:, None]), cfg)
    pl_ul_i = net.path_loss(sl_i, std * draws.shadow_ul)
    i_ul_each = dbm_to_watt(net.ue_power_dbm + g_ul_i - pl_ul_i + net.ul_combining_db)
    i_ul_each = np.where(other, i_ul_each, 0.0)
    s_ul = dbm_to_watt(net.ue_power_dbm + g_serv - pl_serv + net.ul_combining_db)

    sinr_dl = np.empty((len(ru_levels), D))
    sinr_ul = np.empty((len(ru_levels), D))
    for r, ru in enumerate(ru_levels):
        i_dl = np.where(dl_active_u < ru, i_dl_each, 0.0).sum(axis=(1, 2))
        i_ul = np.where(draws.ul_active_u < ru, i_ul_each, 0.0).sum(axis=1)
        sinr_dl[r] = 10 * np.log10(s_dl / (i_dl + net.noise_dl_w))
        sinr_ul[r] = 10 * np.log10(s_ul / (i_ul + net.noise_ul_w))

    snr = {DL: 10 * np.log10(s_dl / net.noise_dl_w), UL: 10 * np.log10(s_ul / net.noise_ul_w)}
    return _Evaluated(site, beam, snr, {DL: sinr_dl, UL: sinr_ul})


def serve(aircraft, net: Network) -> tuple[int, int]:
    """Serving ``(site, beam)`` for one aircraft; beam is -1 in genie mode."""
    xy = np.array([[aircraft.x, aircraft.y]], dtype=float)
    draws = _zero_draws(net, 1)
    ev = _evaluate(net, draws, xy, [0.0])
    return int(ev.site[0]), int(ev.beam[0])


def _zero_draws(net: Network, n: int) -> DropDraws:
    S, B = net.n_sites, net.n_beams
    return DropDraws(np.arange(n), np.zeros(n), np.zeros((n, 3)), np.ones((n, S, B)),
                     np.zeros((n, S, B, 3)), np.ones((n, S)), np.zeros((n, S, 3)),
                     np.zeros((n, S)), np.zeros((n, S)), np.zeros((n, S)))


def sinr_snapshot(aircraft, net: Network, ru: float, direction: str,
                  draws: DropDraws, drop_id: int = 0) -> LinkSample:
    """One link sample for an aircraft at a given position.

    ``draws`` supplies the interferer activity/positions for a single drop
    (its position fields are ignored); see :func:`draw_drops`.
    """
    if not 0 <= ru <= 1:
        raise ValueError("ru must lie in [0, 1]")
    if direction not in (DL, UL):
        raise ValueError(f"direction must be DL or UL, got {direction!r}")
    xy = np.array([[aircraft.x, aircraft.y]], dtype=float)
    ev = _evaluate(net, draws, xy, [ru])
    sinr = float(ev.sinr[direction][0, 0])
    return LinkSample(drop_id, direction, ru, int(ev.site[0]), int(ev.beam[0]), sinr,
                      float(ev.snr[direction][0]), float(net.rate(sinr, ru)))


def _run_chunk(args) -> tuple:
    scn, lo, hi = args
    net = Network(scn)
    draws = draw_drops(net, range(lo, hi))
    ev = _evaluate(net, draws, _aircraft_xy(net, draws), scn.ru_levels)
    return ev.site, ev.beam, ev.snr[DL], ev.snr[UL], ev.sinr[DL], ev.sinr[UL]


def run(scn: Scenario, workers: int = 1) -> "SimResult":
    """Simulate every (direction, RU level) point of the scenario."""
    bounds = [(scn, lo, min(lo + CHUNK, scn.n_drops)) for lo in range(0, scn.n_drops, CHUNK)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, bounds))
    else:
        parts = [_run_chunk(b) for b in bounds]
    site, beam, snr_dl, snr_ul, sinr_dl, sinr_ul = (
        np.concatenate(c, axis=-1) for c in zip(*parts))
    return SimResult(scn, site, beam, {DL: snr_dl, UL: snr_ul}, {DL: sinr_dl, UL: sinr_ul})


class SimResult:
    """Per-drop outcomes of :func:`run` for every (direction, RU) point."""

    def __init__(self, scn: Scenario, site, beam, snr: dict, sinr: dict):
        self.scn = scn
        self.site = site
        self.beam = beam
        self.snr = snr
        self.sinr = sinr
        self._rate = {
            d: np.stack([scenario_rate(scn, sinr[d][r], ru) for r, ru in enumerate(scn.ru_levels)])
            for d in (DL, UL)
        }

    @property
    def ru_levels(self) -> tuple[float, ...]:
        return self.scn.ru_levels

    def _ru_index(self, ru: float) -> int:
        for i, r in enumerate(self.ru_levels):
            if math.isclose(r, ru, rel_tol=1e-12, abs_tol=1e-15):
                return i
        raise KeyError(f"RU level {ru} was not simulated")

    def sinr_at(self, direction: str, ru: float) -> np.ndarray:
        return self.sinr[direction][self._ru_index(ru)]

    def throughput_at(self, direction: str, ru: float) -> np.ndarray:
        return self._rate[direction][self._ru_index(ru)]

    def samples(self) -> Iterator[LinkSample]:
        for d in (DL, UL):
            for r, ru in enumerate(self.ru_levels):
                for i in range(len(self.site)):
                    yield LinkSample(i, d, ru, int(self.site[i]), int(self.beam[i]),
                                     float(self.sinr[d][r, i]), float(self.snr[d][i]),
                                     float(self._rate[d][r, i]))

    def reports(self, metric: str = "throughput") -> list[PercentileReport]:
        source = self._rate if metric == "throughput" else self.sinr
        out = []
        for d in (DL, UL):
            for r, ru in enumerate(self.ru_levels):
                pct = {q: percentile(source[d][r], q) for q in QUANTILES}
                out.append(PercentileReport(d, ru, pct, metric))
        return out

    # -- CSV output -----------------------------------------------------

    def raw_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RAW_COLUMNS)
        for s in self.samples():
            w.writerow([s.drop_id, s.direction, _num(s.ru), s.serving_site, s.serving_beam,
                        f"{s.snr:.6f}", f"{s.sinr:.6f}", f"{s.throughput:.3f}"])
        return buf.getvalue()

    def write(self, outdir: str | Path) -> list[Path]:
        """Write raw samples, summaries and CDF dumps; return the paths."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        path = outdir / "samples.csv"
        path.write_text(self.raw_csv())
        written.append(path)
        for metric in ("sinr", "throughput"):
            path = outdir / f"summary_{metric}.csv"
            path.write_text(summary_csv(self.reports(metric)))
            written.append(path)
            source = self._rate if metric == "throughput" else self.sinr
            for d in (DL, UL):
                for r, ru in enumerate(self.ru_levels):
                    path = outdir / f"cdf_{metric}_{d}_ru{_num(ru)}.csv"
                    path.write_text(cdf_csv(source[d][r]))
                    written.append(path)
        return written


RAW_COLUMNS = ("drop_id", "direction", "ru", "serving_site", "serving_beam",
               "snr_db", "sinr_db", "throughput_bps")
SUMMARY_COLUMNS = ("direction", "ru", "p5", "p50", "p90", "p99", "max")


def _num(x: float) -> str:
    return f"{x:.6g}"


def summary_csv(reports: Sequence[PercentileReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for rep in reports:
        p = rep.percentiles
        w.writerow([rep.direction, _num(rep.ru)] + [f"{p[q]:.6f}" for q in QUANTILES])
    return buf.getvalue()


def cdf_csv(values) -> str:
    x = np.sort(np.asarray(values, dtype=float))
    frac = np.arange(1, x.size + 1) / x.size
    lines = ["value,cumulative_fraction"]
    lines += [f"{v:.6f},{f:.6f}" for v, f in zip(x, frac)]
    return "\n".join(lines) + "\n"


def reports_from_samples(rows: Sequence[dict], metric: str = "throughput") -> list[PercentileReport]:
    """Re-summarize raw sample rows (as read from ``samples.csv``)."""
    key = {"throughput": "throughput_bps", "sinr": "sinr_db", "snr": "snr_db"}[metric]
    groups: dict[tuple[str, float], list[float]] = {}
    for row in rows:
        groups.setdefault((row["direction"], float(row["ru"])), []).append(float(row[key]))
    order = {DL: 0, UL: 1}
    out = []
    for (d, ru) in sorted(groups, key=lambda k: (order.get(k[0], 2), k[1])):
        vals = groups[(d, ru)]
        out.append(PercentileReport(d, ru, {q: percentile(vals, q) for q in QUANTILES}, metric))
    return out
