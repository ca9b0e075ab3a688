"""Command-line front end.

Subcommands mirror the standard campaigns (phase-scan, power-sweep,
pia-compare, spectrum, transfer), plus histogram post-processing of a
transfer output and the synth/analyze pair for debugging single beatnote
records.  Exit codes separate configuration problems from physics-domain
failures and I/O failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analyzer import phase_histogram, spectrum_peaks
from .beatnote import cell_off_record, synthesize_beatnote
from .calibration import resolve_amplifier
from .config import ENV_OUTPUT_DIR, RunConfig, parse_config_document, to_document
from .errors import ConfigError, DomainError, PsalabError
from .fields import FieldAmplitude
from .serialize import (
    default_basename,
    fmt17,
    read_record,
    read_sweep_csv,
    record_to_binary,
    record_to_csv,
    write_sweep,
)
from .squeezer import evolve_two_mode
from .sweeps import SweepResult, run_scan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

_SUBCOMMAND_KINDS = {
    "phase-scan": "phase_scan",
    "power-sweep": "power_sweep",
    "pia-compare": "pia_compare",
    "spectrum": "detuning_spectrum",
    "transfer": "transfer_curve",
}

_EPILOG = f"""\
exit codes:
  0  success
  {EXIT_CONFIG}  configuration error (schema violation, bad flags)
  {EXIT_DOMAIN}  physics-domain error (invalid operating point, extraction failure)
  {EXIT_IO}  I/O error (unreadable input, unwritable output)

environment:
  {ENV_OUTPUT_DIR}  default output directory when neither --out nor the
  config document names one
"""


def _load_document(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path} is not valid JSON: {err}") from None


def _build_config(args: argparse.Namespace, kind: str | None) -> RunConfig:
    doc = _load_document(args.config)
    if kind is not None:
        declared = doc.get("scan", {}).get("kind")
        if declared is not None and declared != kind:
            raise ConfigError(
                f"config declares scan.kind {declared!r} but the subcommand runs {kind!r}"
            )
    cfg = parse_config_document(doc, strict=args.strict, default_kind=kind)
    scan = cfg.scan
    if args.seed is not None:
        scan = replace(scan, detection=replace(scan.detection, rng_seed=args.seed))
    updates: dict = {"scan": scan}
    if args.out is not None:
        updates["output_dir"] = Path(args.out)
    if args.emit is not None:
        updates["emit"] = tuple(args.emit.split(","))
    if args.quiet:
        updates["verbosity"] = 0
    return replace(cfg, **updates)


def _summary(result: SweepResult) -> str:
    cols = result.columns
    if "g_max" in cols:
        g_max = float(cols["g_max"].max())
        g_min = float(cols["g_min"].min()) if "g_min" in cols else float(cols["g_pia"].min())
    else:
        g_max = float(cols["gain"].max())
        g_min = float(cols["gain"].min())
    parts = [
        f"{result.metadata['kind']}:",
        f"g_max={g_max:.6g}",
        f"g_min={g_min:.6g}",
        f"product={g_max * g_min:.6g}",
    ]
    bandwidth = result.metadata.get("bandwidth_khz")
    if bandwidth is not None:
        parts.append(f"bandwidth_khz={bandwidth:.6g}")
    parts.append(f"n={result.x.size}")
    return " ".join(parts)


def run(cfg: RunConfig, basename: str | None = None) -> tuple[int, list[Path]]:
    """Execute a validated run: scan, emit files, print the summary line."""
    result = run_scan(cfg.scan)
    result.metadata["config_echo"] = to_document(cfg)
    paths = write_sweep(result, cfg.output_dir, cfg.emit, basename=basename)
    if cfg.verbosity >= 1:
        print(_summary(result))
    if cfg.verbosity >= 2:
        for path in paths:
            print(f"wrote {path}")
    return EXIT_OK, paths


def _cmd_sweep(args: argparse.Namespace, kind: str) -> int:
    cfg = _build_config(args, kind)
    status, _ = run(cfg, basename=args.name)
    return status


def _cmd_histogram(args: argparse.Namespace) -> int:
    names, data = read_sweep_csv(args.input)
    if args.column not in names:
        raise ConfigError(
            f"{args.input}: column {args.column!r} not found (has: {', '.join(names)})"
        )
    phases = data[:, names.index(args.column)]
    edges, counts = phase_histogram(phases, args.bins)
    out = Path(args.out) if args.out else Path(args.input).parent
    out.mkdir(parents=True, exist_ok=True)
    target = out / (Path(args.input).stem + "_hist.csv")
    lines = ["bin_left,bin_right,count"]
    for left, right, count in zip(edges[:-1], edges[1:], counts):
        lines.append(f"{fmt17(left)},{fmt17(right)},{int(count)}")
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if not args.quiet:
        print(f"histogram: n={int(counts.sum())} bins={args.bins} wrote {target}")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = _build_config(args, "phase_scan")
    spec = cfg.scan
    r, loss = resolve_amplifier(spec.amplifier, spec.calibration)
    s_in, i_in = spec.input_fields()
    if args.cell_off:
        record = cell_off_record(
            s_in, i_in, spec.amplifier.pump_phase, spec.amplifier.detuning, spec.detection
        )
    else:
        s_out, i_out = evolve_two_mode(s_in, i_in, replace(spec.amplifier, r=r, pump_power=None))
        scale = math.sqrt(loss)
        record = synthesize_beatnote(
            FieldAmplitude(s_out.re * scale, s_out.im * scale),
            FieldAmplitude(i_out.re * scale, i_out.im * scale),
            spec.amplifier.pump_phase,
            spec.amplifier.detuning,
            spec.detection,
        )
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    base = args.name or default_basename("record", spec.detection.rng_seed)
    paths = []
    if "csv" in cfg.emit:
        paths.append(record_to_csv(record, cfg.output_dir / f"{base}.csv"))
    if "binary" in cfg.emit:
        paths.append(record_to_binary(record, cfg.output_dir / f"{base}.bin"))
    if not paths:
        raise ConfigError("synth emits records; request 'csv' and/or 'binary'")
    if cfg.verbosity >= 1:
        label = "cell-off" if args.cell_off else "cell-on"
        print(f"synth: {label} record, n={record.n_samples} -> " + ", ".join(map(str, paths)))
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    record = read_record(args.record)
    peaks = spectrum_peaks(record)
    summary = {
        "dc": float(peaks.dc),
        "at_delta": {
            "re": peaks.at_delta.real,
            "im": peaks.at_delta.imag,
            "abs": abs(peaks.at_delta),
        },
        "at_two_delta": {
            "re": peaks.at_two_delta.real,
            "im": peaks.at_two_delta.imag,
            "abs": abs(peaks.at_two_delta),
        },
        "bin_resolution_khz": peaks.bin_resolution,
        "delta_khz": record.delta,
        "sample_rate_khz": record.sample_rate,
        "n_samples": record.n_samples,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON run configuration")
    parser.add_argument("--seed", type=int, metavar="U64", help="override the master RNG seed")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument(
        "--emit", metavar="LIST", help="comma-separated output formats: csv,json,binary"
    )
    parser.add_argument(
        "--strict", action="store_true", help="treat unknown config keys as errors"
    )
    parser.add_argument("--quiet", action="store_true", help="suppress the summary line")
    parser.add_argument("--name", metavar="BASE", help="basename for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psalab",
        description=(
            "Simulated phase-sensitive amplifier laboratory: two-mode parametric "
            "gain, heterodyne beatnote records and FFT gain/phase extraction."
        ),
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"psalab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    descriptions = {
        "phase-scan": "gain versus scanned input phase",
        "power-sweep": "extremal gains versus pump power",
        "pia-compare": "seeded versus unseeded-idler gain",
        "spectrum": "extremal gains versus pump-signal detuning",
        "transfer": "phase-to-phase transfer curve",
    }
    for name, kind in _SUBCOMMAND_KINDS.items():
        sp = sub.add_parser(name, help=descriptions[name])
        _add_common(sp)
        sp.set_defaults(func=lambda args, kind=kind: _cmd_sweep(args, kind))

    hist = sub.add_parser("histogram", help="bin the output phases of a transfer CSV")
    hist.add_argument("input", help="transfer-curve CSV produced by the transfer subcommand")
    hist.add_argument("--bins", type=int, default=40, help="number of bins (default 40)")
    hist.add_argument(
        "--column", default="phi_out_wrapped", help="phase column to bin (default phi_out_wrapped)"
    )
    hist.add_argument("--out", metavar="DIR", help="output directory (default: beside the input)")
    hist.add_argument("--quiet", action="store_true", help="suppress the summary line")
    hist.set_defaults(func=_cmd_histogram)

    synth = sub.add_parser("synth", help="emit one raw beatnote record")
    _add_common(synth)
    synth.add_argument(
        "--cell-off", action="store_true", help="emit the unamplified reference record"
    )
    synth.set_defaults(func=_cmd_synth)

    analyze = sub.add_parser("analyze", help="FFT peak summary of a stored record")
    analyze.add_argument("record", help="record file (.csv or binary)")
    analyze.set_defaults(func=_cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"psalab: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as err:
        print(f"psalab: domain error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except PsalabError as err:
        print(f"psalab: error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as err:
        print(f"psalab: I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
