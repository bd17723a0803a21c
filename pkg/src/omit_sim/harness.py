"""Parameter sweeps, Lorentzian window extraction and power series."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import response
from .fitting import LorentzianFit, fit_lorentzian
from .homodyne import homodyne_signal
from .params import DriveParams, SystemParams
from .response import MODEL_VARIANTS
from .steady_state import OperatingPoint, operating_point_from_flux, photon_flux

AXES = {
    "probe_offset": "rad/s",
    "control_power": "W",
    "control_detuning": "rad/s",
}

OBSERVABLES = {
    "abs_a_minus_sq": "s",
    "abs_x": "m s^0.5",
    "abs_tp_sq": "1",
    "abs_tp_norm_sq": "1",
    "abs_thom_sq": "1",
    "abs_thom_norm_sq": "1",
    "phase": "rad",
    "group_delay": "s",
}

# columns rescaled to a unit maximum when a sweep asks for normalization
NORMALIZABLE = ("abs_a_minus_sq", "abs_x")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    grid: tuple
    system: SystemParams
    drive: DriveParams
    observables: tuple = ("abs_tp_sq",)
    model_variant: str = "full"
    normalize: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}; expected one of {tuple(AXES)}")
        if self.model_variant not in MODEL_VARIANTS:
            raise ValueError(f"unknown model variant {self.model_variant!r}")
        unknown = [o for o in self.observables if o not in OBSERVABLES]
        if unknown:
            raise ValueError(f"unknown observables {unknown}; expected a subset of {tuple(OBSERVABLES)}")
        if len(set(self.observables)) != len(self.observables):
            raise ValueError("observables must not repeat")
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid needs at least 2 points")
        steps = np.diff(grid)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("grid must be strictly monotone")
        object.__setattr__(self, "grid", tuple(float(g) for g in grid))


@dataclass(frozen=True)
class SweepRecord:
    axis_value: float
    values: dict


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: tuple
    units: tuple
    data: np.ndarray
    warnings: list = field(default_factory=list)

    @property
    def records(self) -> list:
        names = self.columns[1:]
        return [SweepRecord(float(row[0]), dict(zip(names, map(float, row[1:]))))
                for row in self.data]

    def column(self, name) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


def linear_grid(start, stop, count):
    if count < 2:
        raise ValueError("count must be >= 2")
    return tuple(np.linspace(start, stop, int(count)).tolist())


def input_flux(system: SystemParams, power: float) -> float:
    """Photon flux reaching the cavity, after the empirical taper loss."""
    return photon_flux(power, system.cavity.wavelength) / system.taper_loss_factor ** 2


def device_operating_point(system: SystemParams, drive: DriveParams) -> OperatingPoint:
    """Operating point of the near-resonant mode including split-mode and taper corrections."""
    eff = system.single_mode()
    return operating_point_from_flux(eff.cavity, eff.mechanics, eff.coupling,
                                     drive.detuning, input_flux(system, drive.input_power))


def derived_scalars(system: SystemParams, drive: DriveParams) -> dict:
    eff = system.single_mode()
    op = device_operating_point(system, drive)
    return {
        "eta_c": system.eta_c,
        "eta_c_effective": eff.eta_c,
        "kappa": system.kappa,
        "q_m": system.mechanics.q_factor,
        "x_zpf": op.x_zpf,
        "omega_c": op.omega_c_rate,
        "cooperativity": op.cooperativity,
        "gamma_omit": response.omit_width(op, eff),
        "group_delay_center": response.group_delay_center(op, eff),
    }


def regime_warnings(system: SystemParams, drive: DriveParams, model: str,
                    op: OperatingPoint | None = None) -> list:
    op = op or device_operating_point(system, drive)
    kappa, omega_m = system.kappa, system.mechanics.omega_m
    out = []
    if model in ("rsb", "weak_coupling"):
        if kappa / omega_m > 0.1:
            out.append(f"resolved-sideband assumption is marginal: kappa/Omega_m = {kappa / omega_m:.3g}")
        if abs(drive.detuning + omega_m) > kappa:
            out.append("control detuning is more than kappa away from the lower sideband")
    if model == "weak_coupling":
        ratio = max(op.omega_c_rate, system.mechanics.gamma_m) / kappa
        if ratio > 0.3:
            out.append(f"weak-coupling assumption is marginal: max(Omega_c, Gamma_m)/kappa = {ratio:.3g}")
    if system.mode_split and system.gamma_split < 10 * kappa:
        out.append(f"mode splitting gamma/kappa = {system.gamma_split / kappa:.3g} is not >> 1")
    if op.omega_c_rate >= omega_m:
        out.append("coupling rate exceeds Omega_m; static bistability may set in")
    return out


def _observables_at(spec: SweepSpec, eff: SystemParams, op: OperatingPoint, omega):
    """Raw observable columns at probe offsets ``omega`` for one operating point.

    ``phase`` is returned wrapped; unwrapping happens over the full grid.
    """
    model = spec.model_variant
    omega = np.asarray(omega, dtype=float)
    delta_prime = omega - eff.mechanics.omega_m
    wanted = set(spec.observables)
    cols = {}

    if wanted & {"abs_a_minus_sq", "abs_x"}:
        if model == "full":
            lr = response.response_direct_solve(op, eff, omega)
            a_minus, x_amp = lr.a_minus, lr.x_amp
        else:
            if model == "rsb":
                a_minus = response.response_rsb(op, eff, delta_prime)
            else:
                a_minus = response.anti_stokes_weak_coupling(op, eff, delta_prime)
            x_amp = response.mechanical_amplitude_rsb(op, eff, delta_prime, a_minus)
        cols["abs_a_minus_sq"] = np.abs(a_minus) ** 2
        cols["abs_x"] = np.abs(x_amp)
    if wanted & {"abs_tp_sq", "abs_tp_norm_sq", "phase"}:
        tp = response.transmission(op, eff, omega, model)
        cols["abs_tp_sq"] = np.abs(tp.t_p) ** 2
        cols["abs_tp_norm_sq"] = np.abs(tp.t_p_norm) ** 2
        cols["phase"] = np.angle(tp.t_p)
    if wanted & {"abs_thom_sq", "abs_thom_norm_sq"}:
        hom = homodyne_signal(op, eff, omega, model, spec.drive.lo_phase)
        cols["abs_thom_sq"] = np.abs(hom.t_hom) ** 2
        cols["abs_thom_norm_sq"] = np.abs(hom.t_hom_norm) ** 2
    if "group_delay" in wanted:
        cols["group_delay"] = response.group_delay(op, eff, delta_prime, model)
    return [np.broadcast_to(cols[name], omega.shape).astype(float)
            for name in spec.observables]


def _evaluate_chunk(spec: SweepSpec, eff: SystemParams, grid: np.ndarray):
    if spec.axis == "probe_offset":
        op = device_operating_point(spec.system, spec.drive)
        cols = _observables_at(spec, eff, op, grid)
        return np.column_stack(cols) if cols else np.empty((grid.size, 0))
    rows = []
    for value in grid:
        if spec.axis == "control_power":
            drive = replace(spec.drive, input_power=float(value))
        else:
            drive = replace(spec.drive, detuning=float(value))
        op = device_operating_point(spec.system, drive)
        rows.append([float(c) for c in _observables_at(spec, eff, op, spec.drive.probe_offset)])
    return np.array(rows, dtype=float).reshape(grid.size, len(spec.observables))


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate every requested observable along the sweep grid.

    Grid chunks may run on several threads; rows are reassembled in grid
    order so the result does not depend on ``threads``.
    """
    eff = spec.system.single_mode()
    grid = np.asarray(spec.grid, dtype=float)
    threads = max(1, int(threads))
    chunks = np.array_split(grid, min(threads, grid.size))
    if threads == 1:
        parts = [_evaluate_chunk(spec, eff, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _evaluate_chunk(spec, eff, c), chunks))
    values = np.vstack(parts)

    names = list(spec.observables)
    if "phase" in names:
        i = names.index("phase")
        values[:, i] = np.unwrap(values[:, i])
    if spec.normalize:
        for name in NORMALIZABLE:
            if name in names:
                i = names.index(name)
                peak = np.max(np.abs(values[:, i]))
                if peak > 0:
                    values[:, i] /= peak

    data = np.column_stack([grid, values])
    columns = (spec.axis,) + tuple(names)
    units = (AXES[spec.axis],) + tuple(OBSERVABLES[n] for n in names)
    warnings = regime_warnings(spec.system, spec.drive, spec.model_variant)
    return SweepResult(spec, columns, units, data, warnings)


def fit_column(result: SweepResult, observable: str, axis_scale: float = 1.0) -> LorentzianFit:
    x = result.data[:, 0] * axis_scale
    return fit_lorentzian(x, result.column(observable))


def window_grid(system: SystemParams, drive: DriveParams, points=2001, span=5.0):
    """Probe offsets covering +/- ``span`` OMIT widths around Omega_m."""
    op = device_operating_point(system, drive)
    width = response.omit_width(op, system.single_mode())
    omega_m = system.mechanics.omega_m
    return linear_grid(omega_m - span * width, omega_m + span * width, points)


def cavity_grid(system: SystemParams, drive: DriveParams, points=2001, span=3.0):
    """Probe offsets covering +/- ``span`` linewidths around the cavity resonance."""
    center = -drive.detuning
    return linear_grid(center - span * system.kappa, center + span * system.kappa, points)


@dataclass(frozen=True)
class PowerSeriesRow:
    power: float
    cooperativity: float
    fit_gamma_omit: float
    fit_peak: float
    theory_gamma_omit: float
    theory_peak: float
    status: str


POWER_SERIES_COLUMNS = (
    ("power", "W"),
    ("cooperativity", "1"),
    ("fit_gamma_omit", "rad/s"),
    ("fit_peak_transmission", "1"),
    ("theory_gamma_omit", "rad/s"),
    ("theory_peak_transmission", "1"),
)


def power_series_analysis(powers, system: SystemParams, drive: DriveParams,
                          model: str = "weak_coupling", points: int = 2001,
                          span: float = 5.0, threads: int = 1) -> list:
    """Fit the normalized homodyne dip for each control power.

    The fitted peak transmission follows from the dip minimum through
    ``|t'_p(0)|^2 = (1 - |t'_hom(0)|)^2``.
    """
    eff = system.single_mode()
    rows = []
    for power in powers:
        d = replace(drive, input_power=float(power))
        op = device_operating_point(system, d)
        theory_width = response.omit_width(op, eff)
        theory_peak = response.peak_transparency(op)
        spec = SweepSpec("probe_offset", window_grid(system, d, points, span), system, d,
                         ("abs_thom_norm_sq",), model)
        fit = fit_column(run_sweep(spec, threads), "abs_thom_norm_sq")
        status = "ok"
        if not fit.converged:
            status = "fit_not_converged"
        elif not fit.fwhm_constrained:
            status = "no_window"
        dip = max(fit.extremum, 0.0)
        rows.append(PowerSeriesRow(float(power), op.cooperativity, fit.fwhm,
                                   (1 - math.sqrt(dip)) ** 2, theory_width, theory_peak,
                                   status))
    return rows


@dataclass(frozen=True)
class DetuningTrace:
    detuning: float
    result: SweepResult
    dip_offset: float

    @property
    def dip_delta_prime(self) -> float:
        return self.dip_offset - self.result.spec.system.mechanics.omega_m


def narrow_dip_offset(spec: SweepSpec, observable: str = "abs_thom_sq") -> float:
    """Grid point where the trace is most suppressed relative to the control-off trace."""
    on = run_sweep(replace(spec, observables=(observable,), normalize=False))
    bare_system = replace(spec.system,
                          coupling=replace(spec.system.coupling, g0=0.0))
    off = run_sweep(replace(spec, system=bare_system, observables=(observable,),
                            normalize=False))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = on.data[:, 1] / off.data[:, 1]
    ratio = np.where(np.isfinite(ratio), ratio, np.inf)
    return float(on.data[int(np.argmin(ratio)), 0])


def detuning_series(detunings, system: SystemParams, drive: DriveParams,
                    observables=("abs_thom_sq",), model="full", points=2001,
                    span=3.0, threads=1) -> list:
    traces = []
    for det in detunings:
        d = replace(drive, detuning=float(det))
        spec = SweepSpec("probe_offset", cavity_grid(system, d, points, span), system, d,
                         tuple(observables), model)
        result = run_sweep(spec, threads)
        traces.append(DetuningTrace(float(det), result, narrow_dip_offset(spec)))
    return traces
