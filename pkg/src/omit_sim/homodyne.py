"""Phase-modulation probing read out by a balanced homodyne receiver.

The control laser carries two modulation sidebands at omega_l +/- Omega.
The network analyzer demodulates the receiver photocurrent at Omega; its
complex output is normalized so that, with the carrier and lower sideband
passing the cavity unchanged, ``t_hom = 1 - t_us``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SystemParams
from .response import residual_transmission, transmission
from .steady_state import OperatingPoint


@dataclass(frozen=True)
class ThreeToneTransmission:
    """Cavity transmissions of carrier, upper and lower sideband.

    ``lo_phase`` is the complex unit number exp(-i Phi).
    """

    t_c: complex
    t_us: complex
    t_ls: complex
    lo_phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not np.allclose(np.abs(self.lo_phase), 1.0, rtol=0, atol=1e-12):
            raise ValueError("lo_phase must have unit modulus")

    @classmethod
    def with_phase(cls, t_c, t_us, t_ls, phi=0.0):
        return cls(t_c, t_us, t_ls, np.exp(-1j * phi))


@dataclass(frozen=True)
class HomodyneSignal:
    in_phase: float
    quadrature: float
    t_hom: complex
    t_hom_norm: complex


def quadratures_full(tones: ThreeToneTransmission, t_r: float = 0.0) -> HomodyneSignal:
    """In-phase and quadrature response to the modulation.

    The beat note is ``A_raw cos(Omega t) + B sin(Omega t)``; the in-phase
    channel is referenced to ``-cos(Omega t)`` so that an untouched carrier
    and lower sideband give ``t_hom = 1 - t_us``. ``t_r`` is the residual
    resonant transmission used for the normalized signal.
    """
    lo_re, lo_im = np.real(tones.lo_phase), np.imag(tones.lo_phase)
    tc_re, tc_im = np.real(tones.t_c), np.imag(tones.t_c)
    us_re, us_im = np.real(tones.t_us), np.imag(tones.t_us)
    ls_re, ls_im = np.real(tones.t_ls), np.imag(tones.t_ls)

    cos_coeff = (-2 * lo_re * tc_re + 2 * lo_im * tc_im
                 + (us_re + ls_re) * lo_re - (us_im + ls_im) * lo_im)
    sin_coeff = -(us_im - ls_im) * lo_re - (us_re - ls_re) * lo_im
    a, b = -cos_coeff, sin_coeff
    t_hom = a + 1j * b
    return HomodyneSignal(a, b, t_hom, t_hom / (1 - t_r))


def homodyne_rsb(t_p):
    return 1 - t_p


def homodyne_dip(op: OperatingPoint, params: SystemParams, delta_prime):
    """|t'_hom|^2 for the weak-coupling Lorentzian window."""
    load = op.omega_c_rate ** 2 / params.kappa
    gamma_m = params.mechanics.gamma_m
    delta_prime = np.asarray(delta_prime, dtype=float)
    return 1 - load * (load + 2 * gamma_m) / ((gamma_m + load) ** 2 + (2 * delta_prime) ** 2)


def bare_cavity_transmission(params: SystemParams, delta_bar, offset):
    """Transmission of a tone at omega_l + offset, optomechanics ignored."""
    kappa = params.kappa
    return 1 - params.eta_c * kappa / (-1j * (delta_bar + np.asarray(offset)) + kappa / 2)


def three_tone(op: OperatingPoint, params: SystemParams, omega, model="full",
               lo_phase=0.0) -> ThreeToneTransmission:
    """Carrier and lower sideband from the bare cavity, upper sideband from ``model``."""
    omega = np.asarray(omega, dtype=float)
    t_us = transmission(op, params, omega, model).t_p
    t_c = bare_cavity_transmission(params, op.delta_bar, 0.0) * np.ones_like(t_us)
    t_ls = bare_cavity_transmission(params, op.delta_bar, -omega)
    return ThreeToneTransmission.with_phase(t_c, t_us, t_ls, lo_phase)


def homodyne_signal(op: OperatingPoint, params: SystemParams, omega, model="full",
                    lo_phase=0.0) -> HomodyneSignal:
    """Receiver output for the sideband-resolved models or the full three-tone picture."""
    t_r = residual_transmission(params)
    if model == "full":
        return quadratures_full(three_tone(op, params, omega, model, lo_phase), t_r)
    t_hom = homodyne_rsb(transmission(op, params, omega, model).t_p)
    return HomodyneSignal(np.real(t_hom), np.imag(t_hom), t_hom, t_hom / (1 - t_r))
