"""Command-line interface: ``vlsvitals {simulate,estimate,sweep,response}``.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

import numpy as np

from .config import FILTER_MODES, SWEEP_PARAMETERS, _parse_grid, _parse_records, load_config
from .dsp import bpm_resolution, estimate_vitals, frequency_response
from .errors import UnstableFilterError, ValidationError, VLSError
from .experiments import GRID_COLUMNS, SWEEP_COLUMNS, SweepSpec, run_sweep, simulate
from .metrics import VitalKind
from .trace import read_trace, write_trace

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@contextmanager
def _csv_sink(path):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        handle = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", path) from exc
    with handle:
        yield handle


def _write_csv(path, columns, rows):
    with _csv_sink(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def _run_config(args):
    run = load_config(args.config)
    if args.seed is not None:
        run = run.update("noise", seed=args.seed).update("sweep", seed_base=args.seed)
    return run


def cmd_simulate(args):
    run = _run_config(args)
    if args.duration is not None:
        run = run.update("simulation", duration_s=args.duration)
    subject = {}
    if args.distance is not None:
        subject["rest_distance_m"] = args.distance
    if args.breathing_bpm is not None:
        subject["breathing_bpm"] = args.breathing_bpm
    if args.heart_bpm is not None:
        subject["heart_bpm"] = args.heart_bpm
    if args.schedule is not None:
        try:
            subject["rate_schedule"] = _parse_records(3)(args.schedule)
        except ValueError as exc:
            raise ValidationError(f"--schedule: {exc}") from None
    if subject:
        run = run.update("subject", **subject)
    if args.snr is not None:
        run = run.update("noise", snr_db=args.snr, noise_std_w=0.0)
    if args.noise_std is not None:
        run = run.update("noise", noise_std_w=args.noise_std, snr_db=None)
    run.validate()

    trace = simulate(run)
    write_trace(trace, args.output)
    if args.csv:
        rows = ({"time_s": t, "power_w": p} for t, p in zip(trace.times().tolist(), trace.samples.tolist()))
        _write_csv(args.csv, ("time_s", "power_w"), rows)
    print(f"wrote {args.output}")
    print(f"samples: {len(trace)} at {trace.sampling_rate:g} Hz ({trace.duration:.2f} s)")
    print(f"true breathing rate: {trace.truth[0]:.4f} BPM")
    print(f"true heart rate: {trace.truth[1]:.4f} BPM")
    return EXIT_OK


def cmd_estimate(args):
    run = _run_config(args)
    changes = {}
    if args.window is not None:
        changes["window_size"] = args.window
    if args.overlap is not None:
        changes["window_overlap"] = args.overlap
    if args.warmup is not None:
        changes["warmup_s"] = args.warmup
    if args.filter is not None:
        changes["filter"] = args.filter
    if args.allow_unstable:
        changes["allow_unstable"] = True
    if args.confidence is not None:
        changes["confidence_threshold"] = args.confidence
    if changes:
        run = run.update("pipeline", **changes)
    run.validate()
    trace = read_trace(args.trace)
    config = run.pipeline_config()
    report = estimate_vitals(trace, config)

    out = sys.stderr if args.csv in ("-",) else sys.stdout
    print(f"windows: {len(report.windows) // 2} x {config.window_size} samples", file=out)
    print(f"bin width: {bpm_resolution(config):.4f} BPM", file=out)
    for w in report.windows:
        flag = "" if w.confident else "  (low confidence)"
        print(f"  window {w.index} {w.kind.value:<9} {w.bpm:9.4f} BPM{flag}", file=out)
    means, variances, errors = report.mean_bpm, report.variance_bpm, report.error_pct
    for kind in VitalKind:
        if means[kind] is None:
            print(f"{kind.value}: no confident estimate", file=out)
            continue
        line = f"{kind.value}: {means[kind]:.4f} BPM, variance {variances[kind]:.4f} BPM^2"
        if kind in errors:
            line += f", error {errors[kind]:.4f}% vs {report.reference_bpm[kind]:.4f} BPM"
        print(line, file=out)
    if args.csv:
        columns = ("window", "kind", "start_sample", "bpm", "peak_bin", "peak_ratio", "confident")
        rows = (
            {"window": w.index, "kind": w.kind.value, "start_sample": w.start, "bpm": w.bpm,
             "peak_bin": w.peak_bin, "peak_ratio": w.peak_ratio, "confident": w.confident}
            for w in report.windows
        )
        _write_csv(args.csv, columns, rows)
    return EXIT_OK


def cmd_sweep(args):
    run = _run_config(args)
    sweep = {}
    if args.parameter is not None:
        sweep["parameter"] = args.parameter
    if args.values is not None:
        try:
            sweep["values"] = tuple(float(v) for v in args.values.split(",") if v.strip())
        except ValueError:
            raise ValidationError(f"--values must be comma-separated numbers, got {args.values!r}") from None
    if args.trials is not None:
        sweep["trials"] = args.trials
    for flag, key in (("grid_x", "grid_x_m"), ("grid_y", "grid_y_m")):
        text = getattr(args, flag)
        if text is not None:
            try:
                sweep[key] = _parse_grid(text)
            except ValueError:
                raise ValidationError(f"--{flag.replace('_', '-')} must be min:max:count") from None
    if sweep:
        run = run.update("sweep", **sweep)
    if args.snr is not None:
        run = run.update("noise", snr_db=args.snr, noise_std_w=0.0)
    if args.noise_std is not None:
        run = run.update("noise", noise_std_w=args.noise_std, snr_db=None)
    run.validate()
    spec = SweepSpec.from_config(run)
    rows = run_sweep(spec, run)
    columns = GRID_COLUMNS if spec.parameter == "position" else SWEEP_COLUMNS
    _write_csv(args.csv, columns, rows)
    return EXIT_OK


def cmd_response(args):
    run = _run_config(args)
    if args.filter is not None:
        run = run.update("pipeline", filter=args.filter)
    if args.points < 2:
        raise ValidationError("--points must be at least 2")
    run.validate()
    fs = run.adc.sampling_rate
    filters = dict(zip(VitalKind, run.filters(allow_unstable=True)))
    kinds = list(VitalKind) if args.kind == "both" else [VitalKind(args.kind)]
    freqs = np.linspace(0.0, fs / 2, args.points)
    rows = []
    for kind in kinds:
        filt = filters[kind]
        print(f"{kind.value} filter [{filt.label}]: {filt.stability()}", file=sys.stderr)
        gain = np.abs(frequency_response(filt, freqs, fs))
        with np.errstate(divide="ignore", invalid="ignore"):
            mag_db = 20 * np.log10(gain)
        for f, db in zip(freqs.tolist(), mag_db.tolist()):
            rows.append({"kind": kind.value, "freq_hz": f, "freq_bpm": 60.0 * f, "magnitude_db": db})
    _write_csv(args.csv, ("kind", "freq_hz", "freq_bpm", "magnitude_db"), rows)
    return EXIT_OK


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="INI run configuration (defaults used when omitted)")
    shared.add_argument("--seed", type=int, help="noise seed / sweep seed base")
    shared.add_argument("--csv", help="write CSV rows to this path ('-' for stdout)")

    parser = _Parser(prog="vlsvitals", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[shared], help="synthesize a received-power trace")
    p.add_argument("output", help="trace file to write")
    p.add_argument("--duration", type=float, help="seconds")
    p.add_argument("--distance", type=float, help="rest distance in meters")
    p.add_argument("--breathing-bpm", type=float)
    p.add_argument("--heart-bpm", type=float)
    p.add_argument("--schedule", help="rate knots 't_s:breathing_bpm:heart_bpm; ...'")
    p.add_argument("--snr", type=float, help="white-noise SNR in dB")
    p.add_argument("--noise-std", type=float, help="white-noise std in watts")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[shared], help="estimate breathing and heart rate from a trace")
    p.add_argument("trace")
    p.add_argument("--window", type=int, help="FFT window size (power of two)")
    p.add_argument("--overlap", type=float, help="window overlap fraction in [0, 1)")
    p.add_argument("--warmup", type=float, help="seconds discarded before the first window")
    p.add_argument("--filter", choices=FILTER_MODES)
    p.add_argument("--allow-unstable", action="store_true", help="accept unstable filter presets")
    p.add_argument("--confidence", type=float, help="peak/median confidence threshold")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", parents=[shared], help="run a parameter sweep and emit CSV")
    p.add_argument("--parameter", choices=SWEEP_PARAMETERS)
    p.add_argument("--values", help="comma-separated values")
    p.add_argument("--trials", type=int)
    p.add_argument("--grid-x", help="min:max:count in meters")
    p.add_argument("--grid-y", help="min:max:count in meters")
    p.add_argument("--snr", type=float)
    p.add_argument("--noise-std", type=float)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("response", parents=[shared], help="filter magnitude response as CSV")
    p.add_argument("--filter", choices=FILTER_MODES)
    p.add_argument("--kind", choices=("breathing", "heart", "both"), default="both")
    p.add_argument("--points", type=int, default=501)
    p.set_defaults(func=cmd_response)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except UnstableFilterError as exc:
        print(f"error: {exc} (use --allow-unstable to override)", file=sys.stderr)
        return EXIT_NUMERIC
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (VLSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
