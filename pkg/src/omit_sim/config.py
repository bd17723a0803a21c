"""INI run configuration with unit-bearing values.

Frequencies are written as linear frequencies (f = omega / 2 pi) in Hz and
multiplied by 2 pi exactly once, when model objects are built. Every value
may carry a unit suffix from the table below; bare numbers are in the
base unit.

=================  ==========  ==============================================
dimension          base unit   accepted suffixes
=================  ==========  ==============================================
frequency          Hz          Hz kHz MHz GHz THz
power              W           W mW uW nW
mass               kg          kg g mg ug ng pg
length             m           m mm um nm pm
frequency pull     Hz/m        <frequency>/<length>, e.g. GHz/nm
angle              rad         rad deg
dimensionless      1           (none)
=================  ==========  ==============================================
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, fields, replace

from .errors import ConfigError, ParameterError
from .harness import AXES, OBSERVABLES, SweepSpec, cavity_grid, linear_grid, window_grid
from .params import CavityParams, CouplingParams, DriveParams, MechanicalParams, SystemParams
from .response import MODEL_VARIANTS

TWO_PI = 2 * math.pi

_PREFIX = {"T": 1e12, "G": 1e9, "M": 1e6, "k": 1e3, "": 1.0, "m": 1e-3,
           "u": 1e-6, "n": 1e-9, "p": 1e-12}
FREQUENCY_UNITS = {p + "Hz": _PREFIX[p] for p in ("T", "G", "M", "k", "")}
POWER_UNITS = {p + "W": _PREFIX[p] for p in ("", "m", "u", "n")}
MASS_UNITS = {"kg": 1.0, **{p + "g": _PREFIX[p] * 1e-3 for p in ("", "m", "u", "n", "p")}}
LENGTH_UNITS = {p + "m": _PREFIX[p] for p in ("", "m", "u", "n", "p")}
ANGLE_UNITS = {"rad": 1.0, "deg": math.pi / 180}

BASE_UNIT = {"frequency": "Hz", "power": "W", "mass": "kg", "length": "m",
             "pull": "Hz/m", "angle": "rad", "number": "", "integer": "",
             "text": "", "flag": ""}

MODEL_ALIASES = {"full": "full", "rsb": "rsb", "weak": "weak_coupling",
                 "weak_coupling": "weak_coupling"}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")

# key -> (dimension, required, is_list)
SCHEMA = {
    "device": {
        "kappa0": ("frequency", True, False),
        "kappa_ex": ("frequency", True, False),
        "wavelength": ("length", False, False),
        "m_eff": ("mass", True, False),
        "omega_m": ("frequency", True, False),
        "gamma_m": ("frequency", True, False),
        "g0": ("pull", True, False),
        "gamma_split": ("frequency", False, False),
        "taper_loss_factor": ("number", False, False),
    },
    "drive": {
        "power": ("power", True, False),
        "detuning": ("frequency", True, False),
        "laser_detuning": ("frequency", False, False),
        "probe_offset": ("frequency", False, False),
        "modulation_depth": ("number", False, False),
        "lo_phase": ("angle", False, False),
    },
    "sweep": {
        "axis": ("text", False, False),
        "grid": ("text", False, False),
        "start": ("axis", False, False),
        "stop": ("axis", False, False),
        "count": ("integer", False, False),
        "values": ("axis", False, True),
        "span": ("number", False, False),
        "observables": ("text", False, True),
        "model": ("text", False, False),
        "normalize": ("flag", False, False),
        "powers": ("power", False, True),
        "detunings": ("frequency", False, True),
    },
    "output": {
        "path": ("text", False, False),
        "format": ("text", False, False),
    },
}

AXIS_DIMENSION = {"probe_offset": "frequency", "control_power": "power",
                  "control_detuning": "frequency"}


@dataclass(frozen=True)
class DeviceConfig:
    kappa0: float
    kappa_ex: float
    m_eff: float
    omega_m: float
    gamma_m: float
    g0: float
    wavelength: float = 775e-9
    gamma_split: float = 0.0
    taper_loss_factor: float = 1.0


@dataclass(frozen=True)
class DriveConfig:
    power: float
    detuning: float
    laser_detuning: float | None = None
    probe_offset: float = 0.0
    modulation_depth: float = 0.0
    lo_phase: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    axis: str = "probe_offset"
    grid: str | None = None
    start: float | None = None
    stop: float | None = None
    count: int = 2001
    values: tuple | None = None
    span: float | None = None
    observables: tuple = ("abs_tp_sq",)
    model: str = "full"
    normalize: bool = False
    powers: tuple | None = None
    detunings: tuple | None = None


@dataclass(frozen=True)
class OutputConfig:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration; numbers are stored in config base units (Hz, W, kg, m)."""

    device: DeviceConfig
    drive: DriveConfig
    sweep: SweepConfig = SweepConfig()
    output: OutputConfig = OutputConfig()

    def system(self) -> SystemParams:
        d = self.device
        try:
            return SystemParams(
                CavityParams(TWO_PI * d.kappa0, TWO_PI * d.kappa_ex, d.wavelength),
                MechanicalParams(d.m_eff, TWO_PI * d.omega_m, TWO_PI * d.gamma_m),
                CouplingParams(TWO_PI * d.g0),
                gamma_split=TWO_PI * d.gamma_split,
                taper_loss_factor=d.taper_loss_factor,
            )
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def drive_params(self) -> DriveParams:
        d = self.drive
        try:
            return DriveParams(d.power, TWO_PI * d.detuning, TWO_PI * d.probe_offset,
                               d.modulation_depth, d.lo_phase)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def laser_detuning(self) -> float:
        """Bare laser detuning (rad/s) for the steady-state solver."""
        d = self.drive
        return TWO_PI * (d.detuning if d.laser_detuning is None else d.laser_detuning)

    def sweep_spec(self, model: str | None = None) -> SweepSpec:
        s = self.sweep
        system, drive = self.system(), self.drive_params()
        scale = TWO_PI if AXIS_DIMENSION[s.axis] == "frequency" else 1.0
        if s.values is not None:
            grid = tuple(scale * v for v in s.values)
        elif s.start is not None and s.stop is not None:
            grid = linear_grid(scale * s.start, scale * s.stop, s.count)
        elif s.grid == "window":
            grid = window_grid(system, drive, s.count, 5.0 if s.span is None else s.span)
        elif s.grid == "cavity":
            grid = cavity_grid(system, drive, s.count, 3.0 if s.span is None else s.span)
        else:
            raise ConfigError("sweep grid needs 'values', 'start'/'stop' or 'grid = window|cavity'",
                              key="grid")
        try:
            return SweepSpec(s.axis, grid, system, drive, tuple(s.observables),
                             model or s.model, s.normalize)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_ini(self) -> str:
        """Canonical text that parses back to an identical configuration."""
        lines = []
        for section in SCHEMA:
            obj = getattr(self, section)
            lines.append(f"[{section}]")
            for f in fields(obj):
                value = getattr(obj, f.name)
                if value is None:
                    continue
                dim = SCHEMA[section][f.name][0]
                if dim == "axis":
                    dim = AXIS_DIMENSION[self.sweep.axis]
                lines.append(f"{f.name} = {_format_value(value, dim)}")
            lines.append("")
        return "\n".join(lines)


def _format_value(value, dim):
    if isinstance(value, tuple):
        return ", ".join(_format_value(v, dim) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        unit = BASE_UNIT[dim]
        return f"{value:.17g} {unit}".rstrip()
    return str(value)


def _pull_units():
    units = {}
    for f_name, f_scale in FREQUENCY_UNITS.items():
        for l_name, l_scale in LENGTH_UNITS.items():
            units[f"{f_name}/{l_name}"] = f_scale / l_scale
    return units


UNIT_TABLES = {
    "frequency": FREQUENCY_UNITS,
    "power": POWER_UNITS,
    "mass": MASS_UNITS,
    "length": LENGTH_UNITS,
    "pull": _pull_units(),
    "angle": ANGLE_UNITS,
    "number": {},
}


def parse_quantity(text: str, dim: str, key: str | None = None, line: int | None = None) -> float:
    """Parse ``"<number> [unit]"`` into the base unit of ``dim``."""
    m = _NUMBER.match(text)
    if not m:
        raise ConfigError(f"cannot parse number from {text.strip()!r}", key, line)
    value, unit = float(m.group(1)), m.group(2)
    if not math.isfinite(value):
        raise ConfigError(f"value {text.strip()!r} is not finite", key, line)
    if not unit:
        return value
    table = UNIT_TABLES[dim]
    if unit not in table:
        allowed = ", ".join(table) or "none"
        raise ConfigError(f"unknown unit {unit!r} for a {dim} (allowed: {allowed})", key, line)
    return value * table[unit]


def _line_numbers(text):
    """Map (section, key) -> 1-based line number."""
    found, section = {}, None
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            found.setdefault((section, None), i)
        elif "=" in stripped and not stripped.startswith(("#", ";")) and section is not None:
            found.setdefault((section, stripped.split("=", 1)[0].strip()), i)
    return found


def _split_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _convert(section, key, raw, dim, is_list, axis, line):
    if dim == "axis":
        dim = AXIS_DIMENSION.get(axis, "frequency")
    if dim == "text":
        return tuple(_split_list(raw)) if is_list else raw.strip()
    if dim == "flag":
        low = raw.strip().lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw.strip()!r}", key, line)
    if dim == "integer":
        try:
            return int(raw.strip())
        except ValueError:
            raise ConfigError(f"expected an integer, got {raw.strip()!r}", key, line) from None
    if is_list:
        items = _split_list(raw)
        if not items:
            raise ConfigError("empty list", key, line)
        return tuple(parse_quantity(item, dim, key, line) for item in items)
    return parse_quantity(raw, dim, key, line)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", line=getattr(exc, "lineno", None)) from exc
    lines = _line_numbers(text)

    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", key=section,
                              line=lines.get((section, None)))
        for key in parser[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key in [{section}]", key=key,
                                  line=lines.get((section, key)))

    axis = parser.get("sweep", "axis", fallback="probe_offset").strip() \
        if parser.has_section("sweep") else "probe_offset"
    if axis not in AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {tuple(AXES)}",
                          key="axis", line=lines.get(("sweep", "axis")))

    values = {}
    for section, keys in SCHEMA.items():
        values[section] = {}
        for key, (dim, required, is_list) in keys.items():
            if not parser.has_option(section, key):
                if required:
                    raise ConfigError(f"missing required key in [{section}]", key=key,
                                      line=lines.get((section, None)))
                continue
            line = lines.get((section, key))
            values[section][key] = _convert(section, key, parser.get(section, key),
                                            dim, is_list, axis, line)

    sweep = values["sweep"]
    if "model" in sweep:
        if sweep["model"] not in MODEL_ALIASES:
            raise ConfigError(f"unknown model {sweep['model']!r}", key="model",
                              line=lines.get(("sweep", "model")))
        sweep["model"] = MODEL_ALIASES[sweep["model"]]
    if "observables" in sweep:
        bad = [o for o in sweep["observables"] if o not in OBSERVABLES]
        if bad:
            raise ConfigError(f"unknown observables {bad}", key="observables",
                              line=lines.get(("sweep", "observables")))
    if "grid" in sweep and sweep["grid"] not in ("window", "cavity"):
        raise ConfigError("grid must be 'window' or 'cavity'", key="grid",
                          line=lines.get(("sweep", "grid")))
    fmt = values["output"].get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigError("format must be 'csv' or 'json'", key="format",
                          line=lines.get(("output", "format")))

    cfg = RunConfig(
        device=DeviceConfig(**values["device"]),
        drive=DriveConfig(**values["drive"]),
        sweep=SweepConfig(**sweep),
        output=OutputConfig(**values["output"]),
    )
    cfg.system()
    cfg.drive_params()
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_model(cfg: RunConfig, model: str) -> RunConfig:
    if model not in MODEL_ALIASES:
        raise ConfigError(f"unknown model {model!r}", key="model")
    return replace(cfg, sweep=replace(cfg.sweep, model=MODEL_ALIASES[model]))
