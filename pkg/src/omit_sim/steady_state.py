"""Static radiation-pressure equilibrium and derived coupling quantities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar

from .errors import ConvergenceError, ParameterError
from .params import CavityParams, CouplingParams, DriveParams, MechanicalParams

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class OperatingPoint:
    """Linearization point of the driven cavity.

    ``a_bar`` is real and nonnegative (global phase choice), ``delta_bar``
    the effective detuning after the static shift, ``omega_c_rate`` the
    magnitude of the optomechanical coupling rate.
    """

    a_bar: float
    x_bar: float
    delta_bar: float
    omega_c_rate: float
    cooperativity: float
    x_zpf: float
    stable: bool = True
    residual: float = 0.0

    @property
    def photons(self) -> float:
        return self.a_bar ** 2


def photon_flux(power, wavelength):
    """Photon flux |s_in|^2 in 1/s carried by ``power`` watts at ``wavelength``."""
    if not wavelength > 0:
        raise ParameterError(f"wavelength must be > 0, got {wavelength!r}")
    if np.any(np.asarray(power) < 0):
        raise ParameterError("power must be >= 0")
    photon_energy = hbar * 2 * math.pi * SPEED_OF_LIGHT / wavelength
    return power / photon_energy


def zero_point_fluctuation(mech: MechanicalParams) -> float:
    return math.sqrt(hbar / (2 * mech.m_eff * mech.omega_m))


def _coupling_quantities(a_bar, cav, mech, cpl):
    x_zpf = zero_point_fluctuation(mech)
    omega_c = abs(2 * cpl.g0 * a_bar * x_zpf)
    coop = omega_c ** 2 / (mech.gamma_m * cav.kappa)
    return x_zpf, omega_c, coop


def _real_cubic_roots(b2, b1, b0):
    """Real roots of t^3 + b2 t^2 + b1 t + b0, closed form."""
    shift = -b2 / 3
    a = b1 - b2 * b2 / 3
    b = 2 * b2 ** 3 / 27 - b2 * b1 / 3 + b0
    disc = b * b / 4 + a ** 3 / 27
    if disc < 0:
        # three distinct real roots, trigonometric form (a < 0 here)
        r = 2 * math.sqrt(-a / 3)
        arg = max(-1.0, min(1.0, 3 * b / (a * r)))
        phi = math.acos(arg) / 3
        return [r * math.cos(phi - 2 * math.pi * k / 3) + shift for k in range(3)]
    s = math.sqrt(disc)
    w = float(np.cbrt(-b / 2 - math.copysign(s, b)))
    t = 0.0 if w == 0 else w - a / (3 * w)
    roots = [t + shift]
    if disc == 0 and a != 0:
        roots.append(-t / 2 + shift)
    return roots


def _newton_polish(v, coeffs, steps=8):
    b2, b1, b0 = coeffs
    for _ in range(steps):
        f = ((v + b2) * v + b1) * v + b0
        df = (3 * v + 2 * b2) * v + b1
        if df == 0:
            break
        dv = f / df
        v -= dv
        if abs(dv) <= 1e-16 * max(abs(v), 1e-300):
            break
    return v


def solve_steady_state(cav: CavityParams, mech: MechanicalParams,
                       cpl: CouplingParams, laser_detuning: float,
                       flux: float) -> list[OperatingPoint]:
    """All static equilibria for a bare laser detuning ``laser_detuning``.

    Works with the frequency pull ``u = g0 * x_bar`` scaled by kappa,
    which obeys the monic cubic

        v^3 - 2 d v^2 + (d^2 + 1/4) v + p = 0,

    ``d = Delta/kappa`` and ``p = hbar g0^2 eta kappa flux / (m Omega_m^2 kappa^3)``.
    A root is statically stable when the cubic's slope there is positive.
    Results are sorted by |x_bar|.
    """
    if flux < 0 or not math.isfinite(flux):
        raise ParameterError(f"flux must be finite and >= 0, got {flux!r}")
    kappa = cav.kappa
    drive = math.sqrt(cav.eta_c * kappa * flux)
    stiffness = mech.m_eff * mech.omega_m ** 2

    if cpl.g0 == 0 or drive == 0:
        a_bar = drive / abs(complex(kappa / 2, -laser_detuning))
        x_zpf, omega_c, coop = _coupling_quantities(a_bar, cav, mech, cpl)
        return [OperatingPoint(a_bar, 0.0, laser_detuning, omega_c, coop, x_zpf)]

    d = laser_detuning / kappa
    p = hbar * cpl.g0 ** 2 * drive ** 2 / (stiffness * kappa ** 3)
    coeffs = (-2 * d, d * d + 0.25, p)

    points = []
    for v in _real_cubic_roots(*coeffs):
        v = _newton_polish(v, coeffs)
        terms = abs(v) ** 3 + 2 * abs(d) * v * v + (d * d + 0.25) * abs(v) + p
        residual = abs(((v + coeffs[0]) * v + coeffs[1]) * v + coeffs[2]) / terms
        if residual > RESIDUAL_TOL:
            raise ConvergenceError(
                f"steady-state root did not converge (relative residual {residual:.3e})",
                residual=residual)
        slope = (3 * v - 4 * d) * v + d * d + 0.25
        delta_bar = laser_detuning - v * kappa
        a_bar = drive / abs(complex(kappa / 2, -delta_bar))
        x_bar = -hbar * cpl.g0 * a_bar ** 2 / stiffness
        x_zpf, omega_c, coop = _coupling_quantities(a_bar, cav, mech, cpl)
        points.append(OperatingPoint(a_bar, x_bar, delta_bar, omega_c, coop, x_zpf,
                                     stable=bool(slope > 0), residual=float(residual)))

    points.sort(key=lambda op: abs(op.x_bar))
    # coincident roots from a numerically double root are reported once
    unique = []
    for op in points:
        if unique and abs(op.x_bar - unique[-1].x_bar) <= 1e-12 * max(abs(op.x_bar), 1e-300):
            continue
        unique.append(op)
    return unique


def self_consistency_residual(op: OperatingPoint, cav: CavityParams,
                              mech: MechanicalParams, cpl: CouplingParams,
                              laser_detuning: float, flux: float) -> float:
    """Largest relative violation of the two static equations at ``op``."""
    drive = math.sqrt(cav.eta_c * cav.kappa * flux)
    target_a = drive / abs(complex(cav.kappa / 2, -(laser_detuning - cpl.g0 * op.x_bar)))
    r_amp = abs(op.a_bar - target_a) / max(target_a, 1e-300)
    force = mech.m_eff * mech.omega_m ** 2 * op.x_bar
    pressure = -hbar * cpl.g0 * op.a_bar ** 2
    scale = max(abs(force), abs(pressure), 1e-300)
    r_force = abs(force - pressure) / scale
    return max(r_amp, r_force) if drive > 0 else abs(op.a_bar) + abs(op.x_bar)


def operating_point(cav: CavityParams, mech: MechanicalParams,
                    cpl: CouplingParams, drive: DriveParams) -> OperatingPoint:
    """Operating point for an effective detuning ``drive.detuning``.

    No cubic is needed: the effective detuning fixes the intracavity
    amplitude directly, and the static displacement follows from it.
    """
    flux = photon_flux(drive.input_power, cav.wavelength)
    return operating_point_from_flux(cav, mech, cpl, drive.detuning, flux)


def operating_point_from_flux(cav, mech, cpl, delta_bar, flux):
    kappa = cav.kappa
    a_bar = math.sqrt(cav.eta_c * kappa * flux) / abs(complex(kappa / 2, -delta_bar))
    x_bar = -hbar * cpl.g0 * a_bar ** 2 / (mech.m_eff * mech.omega_m ** 2)
    x_zpf, omega_c, coop = _coupling_quantities(a_bar, cav, mech, cpl)
    return OperatingPoint(a_bar, x_bar, delta_bar, omega_c, coop, x_zpf)


def flux_for_cooperativity(cav, mech, cpl, delta_bar, cooperativity):
    """Input photon flux that yields ``cooperativity`` at effective detuning ``delta_bar``."""
    if cpl.g0 == 0 or cav.eta_c == 0:
        raise ParameterError("cooperativity is identically zero without coupling")
    x_zpf = zero_point_fluctuation(mech)
    omega_c = math.sqrt(cooperativity * mech.gamma_m * cav.kappa)
    a_bar = omega_c / abs(2 * cpl.g0 * x_zpf)
    return a_bar ** 2 * abs(complex(cav.kappa / 2, -delta_bar)) ** 2 / (cav.eta_c * cav.kappa)
