"""Linearized probe response of the driven optomechanical cavity.

Time dependence follows ``exp(-i Omega t)`` throughout, so a field
delayed by ``tau`` acquires the phase ``+Omega tau``. Probe offsets are
either absolute modulation frequencies ``omega = omega_p - omega_l`` or
offsets from the two-photon resonance ``delta_prime = omega - Omega_m``.
All functions broadcast over array-valued frequencies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import ConvergenceError, DegenerateInputError
from .params import MechanicalParams, SystemParams
from .steady_state import OperatingPoint

MODEL_VARIANTS = ("full", "rsb", "weak_coupling")


@dataclass(frozen=True)
class TransmissionPoint:
    t_p: complex
    t_p_norm: complex
    power_transmission: float
    phase: float


@dataclass(frozen=True)
class LinearResponse:
    """Sideband amplitudes per unit probe amplitude.

    ``x_amp`` is in m per sqrt(photon/s); the displacement is
    ``2 Re[x_amp exp(-i Omega t)]``.
    """

    a_minus: complex
    a_plus: complex
    x_amp: complex

    def transmission(self, params: SystemParams):
        return transmission_point(anti_stokes_to_transmission(self.a_minus, params),
                                  params)


def susceptibility(mech: MechanicalParams, omega):
    return 1.0 / (mech.m_eff * (mech.omega_m ** 2 - omega ** 2
                                - 1j * mech.gamma_m * omega))


def residual_transmission(params: SystemParams) -> float:
    """Bare-cavity transmission with the probe on resonance, ``1 - 2 eta_c``."""
    return 1.0 - 2.0 * params.eta_c


def transmission_point(t_p, params: SystemParams) -> TransmissionPoint:
    t_p = np.asarray(t_p, dtype=complex)
    t_r = residual_transmission(params)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_norm = (t_p - t_r) / (1.0 - t_r)
    if t_p.ndim == 0:
        t_p, t_norm = complex(t_p), complex(t_norm)
    return TransmissionPoint(t_p, t_norm, np.abs(t_p) ** 2, np.angle(t_p))


def anti_stokes_to_transmission(a_minus, params: SystemParams):
    return 1.0 - np.sqrt(params.eta_c * params.kappa) * a_minus


def response_closed_form(op: OperatingPoint, params: SystemParams, omega):
    """Full probe transmission from the closed-form sideband solution."""
    cav, mech = params.cavity, params.mechanics
    kappa, delta = cav.kappa, op.delta_bar
    omega = np.asarray(omega, dtype=float)
    f = (hbar * params.coupling.g0 ** 2 * op.a_bar ** 2 * susceptibility(mech, omega)
         / (1j * (delta - omega) + kappa / 2))
    t_p = 1.0 - cav.eta_c * kappa * (1 + 1j * f) / (
        -1j * (delta + omega) + kappa / 2 + 2 * delta * f)
    return transmission_point(t_p, params)


def response_direct_solve(op: OperatingPoint, params: SystemParams, omega) -> LinearResponse:
    """Solve the coupled anti-Stokes / Stokes / mechanics equations directly.

    Unknowns are ``(A-, conj(A+), X / x_zpf)`` so that every matrix entry
    is a rate in rad/s.
    """
    cav, mech = params.cavity, params.mechanics
    kappa, delta = cav.kappa, op.delta_bar
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    omega = np.atleast_1d(omega)
    g = params.coupling.g0 * op.a_bar * op.x_zpf

    m = np.zeros(omega.shape + (3, 3), dtype=complex)
    m[..., 0, 0] = -1j * (delta + omega) + kappa / 2
    m[..., 0, 2] = 1j * g
    m[..., 1, 1] = 1j * (delta - omega) + kappa / 2
    m[..., 1, 2] = -1j * g
    m[..., 2, 0] = g
    m[..., 2, 1] = g
    m[..., 2, 2] = (mech.omega_m ** 2 - omega ** 2
                    - 1j * mech.gamma_m * omega) / (2 * mech.omega_m)
    rhs = np.zeros(omega.shape + (3, 1), dtype=complex)
    rhs[..., 0, 0] = np.sqrt(cav.eta_c * kappa)
    try:
        sol = np.linalg.solve(m, rhs)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise DegenerateInputError(f"sideband system is singular: {exc}") from exc
    a_minus, a_plus, x_amp = sol[..., 0], np.conj(sol[..., 1]), sol[..., 2] * op.x_zpf
    if scalar:
        return LinearResponse(complex(a_minus[0]), complex(a_plus[0]), complex(x_amp[0]))
    return LinearResponse(a_minus, a_plus, x_amp)


def response_rsb(op: OperatingPoint, params: SystemParams, delta_prime):
    """Anti-Stokes amplitude with the Stokes sideband dropped.

    Keeps the control detuning explicit, so for ``delta_bar = -Omega_m`` the
    first denominator term reduces to ``-i delta_prime + kappa/2``.
    """
    kappa, gamma_m = params.kappa, params.mechanics.gamma_m
    delta_prime = np.asarray(delta_prime, dtype=float)
    cavity_term = (-1j * (op.delta_bar + params.mechanics.omega_m + delta_prime)
                   + kappa / 2)
    return np.sqrt(params.eta_c * kappa) / (
        cavity_term + (op.omega_c_rate ** 2 / 4) / (-1j * delta_prime + gamma_m / 2))


def mechanical_amplitude_rsb(op: OperatingPoint, params: SystemParams,
                             delta_prime, a_minus):
    """Mechanical amplitude driven by ``a_minus`` with the susceptibility
    linearized about Omega_m."""
    mech = params.mechanics
    return (-1j * hbar * params.coupling.g0 * op.a_bar * a_minus
            / (2 * mech.m_eff * mech.omega_m * (-1j * delta_prime + mech.gamma_m / 2)))


def transmission_rsb(op, params, delta_prime):
    return transmission_point(
        anti_stokes_to_transmission(response_rsb(op, params, delta_prime), params), params)


def transmission_weak_coupling(op: OperatingPoint, params: SystemParams, delta_prime):
    """Lorentzian window valid for Omega_c, Gamma_m << kappa at delta_bar = -Omega_m."""
    kappa, gamma_m, eta = params.kappa, params.mechanics.gamma_m, params.eta_c
    oc2 = op.omega_c_rate ** 2
    delta_prime = np.asarray(delta_prime, dtype=float)
    window = oc2 / (oc2 + gamma_m * kappa - 2j * delta_prime * kappa)
    return transmission_point(1 - 2 * eta + 2 * eta * window, params)


def anti_stokes_weak_coupling(op, params, delta_prime):
    t = transmission_weak_coupling(op, params, delta_prime).t_p
    return (1 - t) / np.sqrt(params.eta_c * params.kappa)


def transmission(op: OperatingPoint, params: SystemParams, omega, model="full"):
    """Probe transmission at modulation frequency ``omega`` for a model variant."""
    if model == "full":
        return response_closed_form(op, params, omega)
    delta_prime = np.asarray(omega, dtype=float) - params.mechanics.omega_m
    if model == "rsb":
        return transmission_rsb(op, params, delta_prime)
    if model == "weak_coupling":
        return transmission_weak_coupling(op, params, delta_prime)
    raise ValueError(f"unknown model variant {model!r}; expected one of {MODEL_VARIANTS}")


def omit_width(op: OperatingPoint, params: SystemParams) -> float:
    return params.mechanics.gamma_m * (1 + op.cooperativity)


def peak_transparency(op: OperatingPoint) -> float:
    """|t'_p|^2 at the two-photon resonance in the weak-coupling model."""
    c = op.cooperativity
    return (c / (1 + c)) ** 2


def group_delay_center(op: OperatingPoint, params: SystemParams) -> float:
    """Closed-form delay at the window center, ``2 kappa / (Omega_c^2 + Gamma_m kappa)``."""
    kappa = params.kappa
    return 2 * kappa / (op.omega_c_rate ** 2 + params.mechanics.gamma_m * kappa)


def group_delay(op: OperatingPoint, params: SystemParams, delta_prime,
                model="full", step=None, normalized=False):
    """Group delay d(arg t)/d(omega) by central differences.

    With ``exp(-i omega t)`` time dependence this is the delay of the
    pulse envelope (positive inside a transparency window). ``step``
    defaults to Gamma_OMIT / 1e4; ``normalized`` differentiates t'_p.
    """
    if step is None:
        step = omit_width(op, params) / 1e4
    omega = params.mechanics.omega_m + np.asarray(delta_prime, dtype=float)
    if not step > 0 or np.any(omega + step == omega) or np.any(omega - step == omega):
        raise ConvergenceError(f"finite-difference step {step!r} underflows at this frequency")
    field = "t_p_norm" if normalized else "t_p"
    hi = getattr(transmission(op, params, omega + step, model), field)
    lo = getattr(transmission(op, params, omega - step, model), field)
    return np.angle(hi / lo) / (2 * step)


def unwrapped_phase(t):
    """arg(t) along a monotone grid with 2 pi jumps removed."""
    return np.unwrap(np.angle(np.asarray(t)))
