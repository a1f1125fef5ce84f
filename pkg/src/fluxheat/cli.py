"""Command-line entry point: ``fluxheat {spectrum,sweep,peak,calibrate,validate}``."""
from __future__ import annotations

import argparse
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .dynamics import bare_resistor_power, evaluate_point
from .errors import CalibrationError, ConfigError, ConvergenceError, FluxHeatError, ParameterError
from .output import RunManifest, fmt, input_timestamp, peak_summary, spectrum_csv, sweep_csv
from .params import Config, load_config
from .spectrum import eigensystem, qubit_frequency
from .sweep import FIXED, SELF_CONSISTENT, SweepConfig, run_sweep
from .thermal import (
    CalibrationCurve,
    fit_calibration,
    read_calibration_points,
    switching_ratio,
    voltage_to_temperature,
)
from .validation import FAIL, run_checks

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_VALIDATION = 0, 2, 3, 4
MODES = {"fixed": FIXED, "selfconsistent": SELF_CONSISTENT}


def _common(sub, *, out=True, flux=False, temps=False):
    sub.add_argument("--config", metavar="PATH", help="flat key = value device config")
    if out:
        sub.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    if flux:
        sub.add_argument("--flux-start", type=float, default=0.3)
        sub.add_argument("--flux-stop", type=float, default=0.7)
        sub.add_argument("--points", type=int, default=2001)
    if temps:
        sub.add_argument("--t1", type=float, default=0.3, metavar="K", help="source temperature")
        sub.add_argument("--t0", type=float, default=0.08, metavar="K", help="phonon bath temperature")
        sub.add_argument("--t2", type=float, default=None, metavar="K",
                         help="drain temperature in fixed mode (default: T0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxheat", description="Photon heat transport through a flux qubit between two resistive reservoirs.")
    parser.add_argument("--version", action="version", version=f"fluxheat {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="qubit frequency and eigenenergies vs flux")
    _common(sp, flux=True)

    sw = subs.add_parser("sweep", help="transported power vs flux")
    _common(sw, flux=True, temps=True)
    sw.add_argument("--mode", choices=sorted(MODES), default="fixed")
    sw.add_argument("--summary", metavar="PATH", help="peak summary file (default: OUT.peaks.txt)")
    sw.add_argument("--workers", type=int, default=1)

    pk = subs.add_parser("peak", help="central-peak power: full model vs bare-resistor estimate")
    _common(pk, out=False, temps=True)

    cal = subs.add_parser("calibrate", help="fit a thermometer calibration and convert voltages")
    cal.add_argument("--data", metavar="PATH", help="two-column (voltage V, temperature K) file")
    cal.add_argument("--curve", metavar="PATH", help="use a saved curve instead of fitting")
    cal.add_argument("--invert", metavar="PATH", help="file of voltages to convert to temperature")
    cal.add_argument("--break-temp", type=float, default=None, metavar="K")
    _common(cal)

    va = subs.add_parser("validate", help="run the invariant suite")
    _common(va, out=False)
    return parser


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _manifest(args, cfg: Config, outputs=(), settings=()):
    return RunManifest(
        config_path=args.config,
        subcommand=args.command,
        params=cfg.params,
        outputs=tuple(str(o) for o in outputs if o is not None),
        timestamp=input_timestamp(args.config),
        settings=tuple(settings),
    )


def _grid(args):
    if args.flux_start == args.flux_stop:
        return np.array([args.flux_start])
    if args.flux_start > args.flux_stop or args.points < 2:
        raise ParameterError("need flux-start <= flux-stop and points >= 2")
    return np.linspace(args.flux_start, args.flux_stop, args.points)


def cmd_spectrum(args, cfg):
    params = cfg.params
    rows = []
    for f in _grid(args):
        eig = eigensystem(params, float(f))
        rows.append([f, qubit_frequency(params, float(f)), *eig.frequencies])
    settings = [("flux range", f"{args.flux_start!r} {args.flux_stop!r} {args.points}")]
    _write(args.out, spectrum_csv(rows, _manifest(args, cfg, [args.out], settings)))
    return EXIT_OK


def cmd_sweep(args, cfg):
    sc = SweepConfig(
        fluxStart=args.flux_start, fluxStop=args.flux_stop, points=args.points,
        T1=args.t1, T0=args.t0, T2=args.t2, mode=MODES[args.mode],
        backgroundPower=cfg.backgroundPower,
    )
    result = run_sweep(cfg.params, sc, workers=args.workers)
    summary = args.summary
    if summary is None and args.out is not None:
        summary = str(args.out) + ".peaks.txt"
    settings = [
        ("flux range", f"{sc.fluxStart!r} {sc.fluxStop!r} {sc.points}"),
        ("temperatures", f"T1={sc.T1!r} T0={sc.T0!r} T2={sc.fixed_T2!r}"),
        ("mode", sc.mode),
        ("backgroundPower", repr(sc.backgroundPower)),
    ]
    manifest = _manifest(args, cfg, [args.out, summary], settings)
    _write(args.out, sweep_csv(result, manifest))
    if summary is not None:
        Path(summary).write_text(peak_summary(result, manifest))
    else:
        sys.stderr.write(peak_summary(result))
    return EXIT_OK


def cmd_peak(args, cfg):
    params = cfg.params
    T2 = args.t0 if args.t2 is None else args.t2
    full = evaluate_point(params, 0.5, args.t1, T2).power + cfg.backgroundPower
    off = evaluate_point(params, 0.0, args.t1, T2).power + cfg.backgroundPower
    cold = bare_resistor_power(params, args.t1, 0.5)
    closed = bare_resistor_power(params, args.t1, 0.5, T2=T2)
    ratio = full / closed if closed else float("nan")
    try:
        sw = fmt(switching_ratio(full, off))
    except ParameterError:
        sw = "undefined"
    print(f"T1 = {fmt(args.t1)} K, T2 = {fmt(T2)} K, T0 = {fmt(args.t0)} K")
    print(f"full model central power (W): {fmt(full)}")
    print(f"bare-resistor closed form, drain at 0 K (W): {fmt(cold)}")
    print(f"bare-resistor closed form, drain at T2 (W): {fmt(closed)}")
    print(f"full / closed form: {fmt(ratio)}")
    print(f"switching ratio on/off: {sw}")
    return EXIT_OK


def cmd_calibrate(args, cfg):
    if args.curve:
        curve = CalibrationCurve.from_json(Path(args.curve).read_text())
    elif args.data:
        brk = args.break_temp if args.break_temp is not None else cfg.calibrationBreak
        curve = fit_calibration(read_calibration_points(args.data), break_temp=brk)
    else:
        raise ConfigError("calibrate needs --data or --curve")
    if args.curve is None:
        _write(args.out, curve.to_json())
    if args.invert:
        lines = ["voltage_v,temperature_k"]
        for raw in Path(args.invert).read_text().splitlines():
            raw = raw.split("#", 1)[0].strip()
            if raw:
                v = float(raw)
                lines.append(f"{fmt(v)},{fmt(voltage_to_temperature(curve, v))}")
        target = args.out if args.curve else None
        _write(target, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_validate(args, cfg):
    results = run_checks(cfg.params)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.status:8s} {r.name:{width}s}  {r.detail}")
    failed = [r.name for r in results if r.status == FAIL]
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return EXIT_VALIDATION
    print("all checks passed")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "peak": cmd_peak,
    "calibrate": cmd_calibrate,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else Config()
        return COMMANDS[args.command](args, cfg)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (FluxHeatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
