"""
``nra2g`` command line: simulate, timing, doppler and report.

Exit status is 0 on success, 1 for usage errors, 2 for scenario/config
errors and 3 for runtime (I/O or numerical) failures.  ``simulate`` writes
only inside its output directory, which defaults to ``$NRA2G_OUTPUT_DIR``
or ``./nra2g-out``.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .channel import doppler
from .nrtiming import TimingError, timing_table, timing_table_csv
from .scenario import BAND_NAMES, ScenarioError, dumps_scenario, load_scenario, preset_path
from .simengine import reports_from_samples, run, summary_csv

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3
OUTPUT_ENV = "NRA2G_OUTPUT_DIR"
DEFAULT_OUTPUT = "nra2g-out"

# suffix -> factor to SI base units; longest suffixes are tried first
_UNITS = {
    "km/h": 1 / 3.6, "kmh": 1 / 3.6, "m/s": 1.0,
    "GHz": 1e9, "MHz": 1e6, "kHz": 1e3, "Hz": 1.0,
    "km": 1e3, "m": 1.0,
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]*)\s*$")


class UsageError(Exception):
    pass


def parse_quantity(text: str, allowed: tuple[str, ...] | None = None) -> float:
    """Parse ``"1200km/h"``, ``"3.5GHz"``, ``"300e3"`` ... into SI units.

    ``allowed`` restricts the accepted suffixes (a bare number is always
    accepted).  Raises :class:`ValueError` for anything else.
    """
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    number, unit = m.groups()
    if not unit:
        return float(number)
    if unit not in _UNITS or (allowed is not None and unit not in allowed):
        raise ValueError(f"unknown or unsupported unit {unit!r} in {text!r}")
    return float(number) * _UNITS[unit]


def _quantity_arg(allowed):
    def conv(text):
        try:
            return parse_quantity(text, allowed)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return conv


def _list_arg(conv):
    def parse(text):
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [conv(t) for t in items]
    return parse


def _int_arg(text):
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None


def _overhead_arg(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid overhead {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("overhead must lie in (0, 1]")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nra2g", description="NR air-to-ground simulator and calculators")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a Monte Carlo study")
    s.add_argument("--scenario", required=True,
                   help=f"scenario file, or a preset name ({', '.join(BAND_NAMES)})")
    s.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a scenario field; repeatable; unit suffixes allowed")
    s.add_argument("--workers", type=_int_arg, default=1)

    t = sub.add_parser("timing", help="timing advance / guard period / TDD table")
    t.add_argument("--radius", type=_quantity_arg(("m", "km")), required=True)
    t.add_argument("--mu", type=_list_arg(_int_arg), default=[0, 1, 2, 3, 4])
    t.add_argument("--overhead", type=_overhead_arg, default=0.1)
    t.add_argument("--csv", action="store_true", help="emit CSV instead of a table")

    d = sub.add_parser("doppler", help="Doppler shift and UL pre-compensation")
    d.add_argument("--speed", type=_quantity_arg(("km/h", "kmh", "m/s")), required=True,
                   help="e.g. 1200km/h; bare numbers are m/s")
    d.add_argument("--carriers", type=_list_arg(_quantity_arg(("Hz", "kHz", "MHz", "GHz"))),
                   default=[700e6, 3.5e9, 28e9])

    r = sub.add_parser("report", help="re-summarize an existing samples.csv")
    r.add_argument("samples")
    r.add_argument("--metric", choices=("throughput", "sinr", "snr"), default="throughput")
    return p


# -- simulate -------------------------------------------------------------

def _resolve_scenario(arg: str) -> Path:
    path = Path(arg)
    if not path.exists() and arg in BAND_NAMES:
        return preset_path(arg)
    return path


def _parse_overrides(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        value = value.strip()
        try:
            # unit-suffixed numbers become plain SI numbers
            if _QUANTITY.match(value) and _QUANTITY.match(value).group(2):
                value = repr(parse_quantity(value))
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        out[key.strip()] = value
    return out


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the manifest for byte-identical reruns
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (datetime.fromtimestamp(int(epoch), timezone.utc) if epoch
            else datetime.now(timezone.utc))
    return when.isoformat(timespec="seconds")


def cmd_simulate(args) -> int:
    scn_path = _resolve_scenario(args.scenario)
    overrides = _parse_overrides(args.set)
    scn = load_scenario(scn_path)
    if overrides:
        scn = scn.with_overrides(**overrides)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    outdir = Path(args.out or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)
    outdir.mkdir(parents=True, exist_ok=True)

    manifest = {
        "scenario_path": str(scn_path),
        "output_dir": str(outdir),
        "timestamp": _timestamp(),
        "version": __version__,
        "seed": scn.seed,
        "overrides": overrides,
        "effective_scenario": "scenario.scn",
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    (outdir / "scenario.scn").write_text(dumps_scenario(scn))

    result = run(scn, workers=args.workers)
    written = result.write(outdir)
    print(summary_csv(result.reports("sinr")), end="")
    print(f"wrote {len(written) + 2} files to {outdir}", file=sys.stderr)
    return EXIT_OK


# -- calculators ----------------------------------------------------------

def cmd_timing(args) -> int:
    rows = timing_table(args.radius, args.mu, args.overhead)
    if args.csv:
        print(timing_table_csv(rows), end="")
        return EXIT_OK
    head = f"{'mu':>2} {'rtt_ms':>8} {'ta_lim_ms':>9} {'TA ok':>5} {'gp_slots':>8} " \
           f"{'period_ms':>9} {'pattern':>10} {'k1':>4}"
    print(f"cell radius {args.radius:g} m, guard overhead <= {args.overhead:g}")
    print(head)
    for r in rows:
        print(f"{r['mu']:>2} {r['rtt_ms']:>8.4f} {r['ta_limit_ms']:>9.4f} "
              f"{'yes' if r['feasible'] else 'no':>5} {r['gp_slots']:>8} "
              f"{r['min_period_ms']:>9.3f} {r['pattern']:>10} {r['k1_required']:>4}")
    return EXIT_OK


def cmd_doppler(args) -> int:
    if args.speed < 0:
        raise UsageError("--speed must be >= 0")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["carrier_hz", "speed_ms", "dl_shift_khz", "shift_ppm", "ul_raw_khz",
                "ul_precomp_khz", "ul_residual_khz"])
    for f in args.carriers:
        b = doppler(args.speed, f)
        w.writerow([f"{f:g}", f"{b.speed:.4f}", f"{b.shift_dl / 1e3:.4f}", f"{b.shift_ppm:.4f}",
                    f"{b.shift_ul_raw / 1e3:.4f}", f"{b.precompensation / 1e3:.4f}",
                    f"{b.shift_ul_residual / 1e3:.4f}"])
    return EXIT_OK


def cmd_report(args) -> int:
    with open(args.samples, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ScenarioError(f"{args.samples}: no samples")
    print(summary_csv(reports_from_samples(rows, args.metric)), end="")
    return EXIT_OK


_COMMANDS = {"simulate": cmd_simulate, "timing": cmd_timing,
             "doppler": cmd_doppler, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, TimingError, KeyError) as exc:
        print(f"nra2g: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"nra2g: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
