"""
Closed-form NR timing checks for large, fast-moving A2G cells.

Durations are in milliseconds, distances in metres and speeds in m/s.
Design figures such as "2 ms for 300 km" are rounded (the exact round trip
over 300 km is 2.0014 ms), so feasibility and slot-count checks accept a
relative shortfall of ``ROUNDING_TOLERANCE``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .channel import SPEED_OF_LIGHT

__all__ = [
    "NR_MAX_K1",
    "ROUNDING_TOLERANCE",
    "TimingError",
    "Numerology",
    "TddPattern",
    "round_trip_time",
    "max_initial_timing_advance",
    "ta_feasible",
    "guard_period",
    "guard_slots",
    "min_tdd_period",
    "build_pattern",
    "required_k1",
    "earliest_k1",
    "dl_ul_ratio",
    "cell_traversal_time",
    "timing_table",
    "timing_table_csv",
]

NR_MAX_K1 = 15
ROUNDING_TOLERANCE = 1e-3

DL, GP, UL = "DL", "GP", "UL"


class TimingError(ValueError):
    pass


@dataclass(frozen=True)
class Numerology:
    mu: int

    def __post_init__(self) -> None:
        if self.mu not in range(5):
            raise TimingError(f"numerology mu must be in 0..4, got {self.mu}")

    @property
    def scs(self) -> float:
        """Subcarrier spacing in kHz."""
        return 15.0 * 2**self.mu

    @property
    def slot_duration(self) -> float:
        return 1.0 / 2**self.mu


@dataclass(frozen=True)
class TddPattern:
    numerology: Numerology
    slots: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.slots:
            raise TimingError("pattern must contain at least one slot")
        for s in self.slots:
            if s not in (DL, GP, UL):
                raise TimingError(f"unknown slot kind {s!r}")
        for a, b in zip(self.slots, self.slots[1:] + self.slots[:1]):
            if a == DL and b == UL and len(self.slots) > 1:
                raise TimingError("every DL->UL transition needs a GP slot")

    @property
    def period(self) -> float:
        return len(self.slots) * self.numerology.slot_duration

    def count(self, kind: str) -> int:
        return self.slots.count(kind)

    @property
    def guard_span(self) -> float:
        return self.count(GP) * self.numerology.slot_duration


def round_trip_time(cell_radius: float) -> float:
    if cell_radius < 0:
        raise TimingError("cell radius must be >= 0")
    return 2.0 * cell_radius / SPEED_OF_LIGHT * 1e3


def max_initial_timing_advance(mu: int) -> float:
    """Largest timing advance reachable at initial access, 2^-mu * 2 ms."""
    Numerology(mu)
    return 2.0 * 2.0**-mu


def ta_feasible(mu: int, cell_radius: float) -> tuple[bool, float]:
    """Whether the initial TA range covers the cell; returns (ok, margin_ms)."""
    limit = max_initial_timing_advance(mu)
    rtt = round_trip_time(cell_radius)
    return limit >= rtt * (1 - ROUNDING_TOLERANCE), limit - rtt


def guard_period(cell_radius: float) -> float:
    """Guard period needed between DL and UL slots; equals the round trip."""
    return round_trip_time(cell_radius)


def guard_slots(gp: float, numerology: Numerology) -> int:
    """Whole slots needed to span a guard period of ``gp`` ms."""
    return math.ceil(gp * (1 - ROUNDING_TOLERANCE) / numerology.slot_duration)


def min_tdd_period(gp: float, max_overhead: float) -> float:
    """Shortest TDD period keeping the guard overhead at or below ``max_overhead``."""
    if gp < 0:
        raise TimingError("guard period must be >= 0")
    if not 0 < max_overhead <= 1:
        raise TimingError("max_overhead must lie in (0, 1]")
    return gp / max_overhead


def build_pattern(numerology: Numerology | int, n_dl: int, n_gp: int, n_ul: int,
                  cell_radius: float | None = None) -> TddPattern:
    """Canonical DL-block, GP-block, UL-block pattern.

    With ``cell_radius`` given, the GP block must cover the guard period
    of that radius.
    """
    if not isinstance(numerology, Numerology):
        numerology = Numerology(numerology)
    if min(n_dl, n_gp, n_ul) < 0 or n_dl + n_gp + n_ul < 1:
        raise TimingError("slot counts must be >= 0 with at least one slot")
    if n_dl > 0 and n_ul > 0 and n_gp < 1:
        raise TimingError("a pattern with DL and UL needs at least one GP slot")
    if cell_radius is not None and n_dl > 0 and n_ul > 0:
        need = guard_period(cell_radius)
        have = n_gp * numerology.slot_duration
        if have < need * (1 - ROUNDING_TOLERANCE):
            raise TimingError(
                f"guard insufficient: {n_gp} GP slots span {have:g} ms, "
                f"{need:.4g} ms needed for {cell_radius:g} m"
            )
    return TddPattern(numerology, (DL,) * n_dl + (GP,) * n_gp + (UL,) * n_ul)


def _dl_ul_indices(pattern: TddPattern) -> tuple[list[int], list[int]]:
    dl = [i for i, s in enumerate(pattern.slots) if s == DL]
    ul = [i for i, s in enumerate(pattern.slots) if s == UL]
    if not dl or not ul:
        raise TimingError("pattern needs both DL and UL slots")
    return dl, ul


def required_k1(pattern: TddPattern) -> tuple[int, bool]:
    """Worst-case HARQ offset, first DL slot to last UL slot.

    Returns ``(k1, fits_nr)`` where ``fits_nr`` compares against the NR
    maximum of 15.
    """
    dl, ul = _dl_ul_indices(pattern)
    k1 = ul[-1] - dl[0]
    return k1, k1 <= NR_MAX_K1


def earliest_k1(pattern: TddPattern) -> int:
    """Largest offset from any DL slot to its earliest following UL slot.

    The next period is considered when no UL slot follows in the current
    one.
    """
    dl, ul = _dl_ul_indices(pattern)
    n = len(pattern.slots)
    worst = 0
    for d in dl:
        worst = max(worst, min((u - d) % n or n for u in ul))
    return worst


def dl_ul_ratio(pattern: TddPattern) -> float:
    n_ul = pattern.count(UL)
    if n_ul == 0:
        raise TimingError("pattern has no UL slots")
    return pattern.count(DL) / n_ul


def cell_traversal_time(cell_radius: float, speed: float) -> float:
    """Worst-case time (s) to cross a cell along its diameter."""
    if speed <= 0:
        raise TimingError("speed must be > 0")
    return 2.0 * cell_radius / speed


def timing_table(cell_radius: float, mus=range(5), max_overhead: float = 0.1,
                 dl_ul: tuple[int, int] = (2, 1)) -> list[dict]:
    """Per-numerology feasibility rows for one cell radius.

    The TDD pattern of each row uses the minimum period for the overhead
    target, the fewest GP slots covering the guard period, and splits the
    remaining slots between DL and UL in the ``dl_ul`` proportion.
    """
    rows = []
    gp = guard_period(cell_radius)
    period = min_tdd_period(gp, max_overhead)
    for mu in mus:
        num = Numerology(mu)
        ok, margin = ta_feasible(mu, cell_radius)
        n_gp = max(guard_slots(gp, num), 1)
        n_total = max(round(period * (1 - ROUNDING_TOLERANCE) / num.slot_duration), n_gp + 2)
        n_data = n_total - n_gp
        n_ul = max(round(n_data * dl_ul[1] / sum(dl_ul)), 1)
        n_dl = max(n_data - n_ul, 1)
        k1, _ = required_k1(build_pattern(num, n_dl, n_gp, n_ul))
        rows.append({
            "radius": cell_radius,
            "mu": mu,
            "rtt_ms": round_trip_time(cell_radius),
            "ta_limit_ms": max_initial_timing_advance(mu),
            "feasible": ok,
            "margin_ms": margin,
            "gp_ms": gp,
            "gp_slots": n_gp,
            "min_period_ms": period,
            "pattern": f"{n_dl}/{n_gp}/{n_ul}",
            "k1_required": k1,
        })
    return rows


CSV_COLUMNS = ("radius", "mu", "rtt_ms", "ta_limit_ms", "feasible", "gp_ms",
               "min_period_ms", "k1_required")


def timing_table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([
            f"{r['radius']:g}", r["mu"], f"{r['rtt_ms']:.6f}", f"{r['ta_limit_ms']:.6f}",
            "true" if r["feasible"] else "false", f"{r['gp_ms']:.6f}",
            f"{r['min_period_ms']:.6f}", r["k1_required"],
        ])
    return buf.getvalue()
