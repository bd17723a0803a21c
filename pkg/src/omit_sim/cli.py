"""Command-line front end.

Every ``cmd_*`` function takes a parsed :class:`RunConfig` and returns a
:class:`ResultEnvelope`, so the commands can be driven from Python as
well as from the shell.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import response
from .config import RunConfig, load_config, with_model
from .eit import eit_coherence, map_omit_to_eit
from .errors import ConfigError, ConvergenceError, DegenerateInputError, ParameterError
from .fitting import fit_lorentzian
from .harness import (
    POWER_SERIES_COLUMNS,
    derived_scalars,
    detuning_series,
    device_operating_point,
    input_flux,
    power_series_analysis,
    regime_warnings,
    run_sweep,
)
from .output import ResultEnvelope, read_csv_column
from .steady_state import solve_steady_state

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

EIT_TOLERANCE = 1e-12

CONFIG_HELP = """\
config file (INI):
  [device]  kappa0, kappa_ex, omega_m, gamma_m  (Hz, linear frequency)
            m_eff (kg), g0 (Hz/m), wavelength (m, default 775 nm)
            gamma_split (Hz, default 0), taper_loss_factor (default 1)
  [drive]   power (W), detuning (Hz, effective control detuning)
            laser_detuning (Hz, bare; steady-state only), probe_offset (Hz)
            modulation_depth, lo_phase (rad)
  [sweep]   axis = probe_offset | control_power | control_detuning
            values = v1, v2, ...   or  start, stop, count
            or grid = window | cavity  (with count, span)
            observables, model = full | rsb | weak, normalize = true|false
            powers (W, power-series), detunings (Hz, detuning-series)
  [output]  path, format = csv | json

units: Hz kHz MHz GHz THz | W mW uW nW | kg g mg ug ng pg | m mm um nm pm
       pull as <freq>/<length>, e.g. -12 GHz/nm | angles rad or deg
frequencies are linear (omega / 2 pi); outputs are in rad/s and SI units.
exit codes: 0 ok, 1 check failed, 2 config error, 3 solver failure, 4 I/O failure
"""


def _envelope(command, cfg: RunConfig, columns, units, rows, warnings=(), extra=None,
              derived=True):
    scalars = derived_scalars(cfg.system(), cfg.drive_params()) if derived else {}
    return ResultEnvelope(command, cfg.to_ini(), scalars, tuple(columns), tuple(units),
                          [list(r) for r in rows], list(warnings), dict(extra or {}))


def cmd_steady_state(cfg: RunConfig) -> ResultEnvelope:
    """All static equilibria of the near-resonant mode with stability flags."""
    system = cfg.system()
    eff = system.single_mode()
    flux = input_flux(system, cfg.drive.power)
    roots = solve_steady_state(eff.cavity, eff.mechanics, eff.coupling,
                               cfg.laser_detuning(), flux)
    rows = [(op.x_bar, op.a_bar, op.delta_bar, op.omega_c_rate, op.cooperativity,
             op.stable, op.residual) for op in roots]
    columns = ("x_bar", "a_bar", "delta_bar", "omega_c", "cooperativity", "stable", "residual")
    units = ("m", "s^-0.5", "rad/s", "rad/s", "1", "bool", "1")
    extra = {"roots": len(roots), "stable_roots": sum(op.stable for op in roots)}
    return _envelope("steady-state", cfg, columns, units, rows, extra=extra)


def cmd_sweep(cfg: RunConfig, threads: int = 1) -> ResultEnvelope:
    spec = cfg.sweep_spec()
    result = run_sweep(spec, threads)
    return _envelope("sweep", cfg, result.columns, result.units, result.data.tolist(),
                     result.warnings)


def cmd_power_series(cfg: RunConfig, threads: int = 1) -> ResultEnvelope:
    s = cfg.sweep
    powers = s.powers if s.powers is not None else (cfg.drive.power,)
    span = 5.0 if s.span is None else s.span
    rows = power_series_analysis(powers, cfg.system(), cfg.drive_params(), s.model,
                                 s.count, span, threads)
    columns = tuple(c for c, _ in POWER_SERIES_COLUMNS) + ("status",)
    units = tuple(u for _, u in POWER_SERIES_COLUMNS) + ("text",)
    table = [(r.power, r.cooperativity, r.fit_gamma_omit, r.fit_peak, r.theory_gamma_omit,
              r.theory_peak, r.status) for r in rows]
    warnings = regime_warnings(cfg.system(), cfg.drive_params(), s.model)
    return _envelope("power-series", cfg, columns, units, table, warnings)


def cmd_detuning_series(cfg: RunConfig, threads: int = 1):
    """Summary envelope plus one sweep envelope per detuning."""
    s = cfg.sweep
    detunings = s.detunings if s.detunings is not None else (cfg.drive.detuning,)
    span = 3.0 if s.span is None else s.span
    traces = detuning_series([2 * math.pi * d for d in detunings], cfg.system(),
                             cfg.drive_params(), s.observables, s.model, s.count, span,
                             threads)
    per_trace = []
    rows = []
    for det_hz, trace in zip(detunings, traces):
        sub = replace(cfg, drive=replace(cfg.drive, detuning=det_hz))
        res = trace.result
        per_trace.append(_envelope("sweep", sub, res.columns, res.units, res.data.tolist(),
                                   res.warnings))
        grid = np.asarray(res.spec.grid)
        spacing = float(abs(grid[1] - grid[0]))
        rows.append((trace.detuning, trace.dip_offset, trace.dip_delta_prime, spacing))
    summary = _envelope("detuning-series", cfg,
                        ("detuning", "dip_offset", "dip_delta_prime", "grid_spacing"),
                        ("rad/s", "rad/s", "rad/s", "rad/s"), rows)
    return summary, per_trace


def cmd_eit_compare(cfg: RunConfig, mapper=map_omit_to_eit) -> ResultEnvelope:
    """Pointwise comparison of the mapped Lambda-system coherence and A-.

    ``mapper`` builds ``(lambda_params, ratio)`` from an operating point; it
    is swappable so a deliberately wrong mapping can be checked.
    """
    system, drive = cfg.system(), cfg.drive_params()
    eff = system.single_mode()
    op = device_operating_point(system, drive)
    s = cfg.sweep
    span = 5.0 if s.span is None else s.span
    width = response.omit_width(op, eff)
    delta_prime = np.linspace(-span * width, span * width, s.count)
    lam, ratio = mapper(op, eff)
    omit = ratio * response.response_rsb(op, eff, delta_prime)
    eit = eit_coherence(lam, delta_prime)
    deviation = np.abs(eit - omit) / np.abs(omit)
    max_dev = float(np.max(deviation))
    passed = bool(max_dev <= EIT_TOLERANCE)
    lam_report = {name: float(getattr(lam, name)) for name in
                  ("omega21", "omega31", "mu13", "mu23", "gamma12", "gamma13",
                   "field_c", "field_p", "omega_c_laser", "omega_p_laser")}
    lam_report.update(rabi=float(lam.rabi), control_detuning=float(lam.control_detuning),
                      cooperativity=float(lam.cooperativity))
    rows = np.column_stack([delta_prime, np.abs(omit), np.abs(eit), deviation]).tolist()
    extra = {"max_relative_deviation": max_dev, "tolerance": EIT_TOLERANCE,
             "passed": passed, "lambda_system": lam_report}
    return _envelope("eit-compare", cfg,
                     ("delta_prime", "abs_omit_s13", "abs_eit_s13", "relative_deviation"),
                     ("rad/s", "1", "1", "1"), rows, extra=extra)


def cmd_fit(text: str, column: str, source: str = "<input>") -> ResultEnvelope:
    x, y, x_unit, y_unit = read_csv_column(text, column)
    fit = fit_lorentzian(x, y)
    row = (fit.center, fit.fwhm, fit.depth, fit.baseline, fit.extremum, fit.rms_residual,
           fit.converged, fit.iterations, fit.fwhm_constrained)
    columns = ("center", "fwhm", "depth", "baseline", "extremum", "rms_residual",
               "converged", "iterations", "fwhm_constrained")
    units = (x_unit, x_unit, y_unit, y_unit, y_unit, y_unit, "bool", "1", "bool")
    return ResultEnvelope("fit", f"input = {source}\ncolumn = {column}\n", {}, columns, units,
                          [list(row)])


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("OMIT_SIM_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"OMIT_SIM_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("OMIT_SIM_THREADS must be >= 1")
        return n
    return 1


def _write(text: str, path):
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")


def _numbered(path, index, detuning_hz):
    p = Path(path)
    tag = f"{detuning_hz / 1e6:+.4g}MHz".replace("+", "p").replace("-", "m")
    return p.with_name(f"{p.stem}_{index}_{tag}{p.suffix}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: [output] path or stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--threads", type=int, help="worker threads (env OMIT_SIM_THREADS)")

    with_config = argparse.ArgumentParser(add_help=False, parents=[common])
    with_config.add_argument("--config", required=True, help="INI run configuration")
    with_config.add_argument("--model", choices=("full", "rsb", "weak"),
                             help="override the [sweep] model variant")

    parser = argparse.ArgumentParser(
        prog="omit-sim", description="Optomechanically induced transparency simulator.",
        epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("steady-state", "static equilibria and their stability"),
                       ("sweep", "evaluate observables along a sweep grid"),
                       ("power-series", "fit window width and depth versus control power"),
                       ("detuning-series", "probe scans for a list of control detunings"),
                       ("eit-compare", "check the optomechanical / atomic EIT mapping")):
        sub.add_parser(name, parents=[with_config], help=text, epilog=CONFIG_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    fit = sub.add_parser("fit", parents=[common], help="fit a Lorentzian to a CSV column")
    fit.add_argument("--input", required=True, help="CSV written by this tool")
    fit.add_argument("--column", required=True, help="column name without unit")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads(args.threads)
        if args.command == "fit":
            try:
                text = Path(args.input).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
                return EXIT_IO
            try:
                env = cmd_fit(text, args.column, args.input)
            except (KeyError, ValueError) as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_CHECK_FAILED
            _write(env.render(args.format or "csv"), args.out)
            return EXIT_OK

        cfg = load_config(args.config)
        if args.model:
            cfg = with_model(cfg, args.model)
        fmt = args.format or cfg.output.format
        out = args.out or cfg.output.path

        if args.command == "steady-state":
            env = cmd_steady_state(cfg)
        elif args.command == "sweep":
            env = cmd_sweep(cfg, threads)
        elif args.command == "power-series":
            env = cmd_power_series(cfg, threads)
        elif args.command == "eit-compare":
            env = cmd_eit_compare(cfg)
            fmt = args.format or "json"
        else:
            env, traces = cmd_detuning_series(cfg, threads)
            if out is not None:
                for i, (det, trace) in enumerate(zip(cfg.sweep.detunings or
                                                     (cfg.drive.detuning,), traces)):
                    _write(trace.render(fmt), _numbered(out, i, det))
        _write(env.render(fmt), out)
        if args.command == "eit-compare" and not env.extra["passed"]:
            return EXIT_CHECK_FAILED
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, DegenerateInputError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None):
    sys.exit(run(argv))
