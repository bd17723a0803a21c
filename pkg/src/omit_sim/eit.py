"""Atomic Lambda-system EIT and its correspondence with OMIT.

Levels: ground states |1>, |2> and excited |3>. The probe drives 1-3, the
control 2-3. Weak-probe populations (sigma_11 = 1, the rest 0) are
assumed, and only steady-state coherences are computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import hbar

from .params import CavityParams, SystemParams
from .steady_state import OperatingPoint, operating_point_from_flux

REFERENCE_DIPOLE = 1e-29  # C m, order of an optical dipole transition


@dataclass(frozen=True)
class LambdaSystemParams:
    omega21: float
    omega31: float
    mu13: float
    mu23: float
    gamma12: float
    gamma13: float
    field_c: float
    field_p: float
    omega_c_laser: float
    omega_p_laser: float

    def __post_init__(self):
        if self.gamma12 <= 0 or self.gamma13 <= 0:
            raise ValueError("coherence damping rates must be positive")

    @property
    def omega32(self) -> float:
        return self.omega31 - self.omega21

    @property
    def control_detuning(self) -> float:
        return self.omega_c_laser - self.omega32

    @property
    def rabi(self) -> float:
        return self.mu23 * self.field_c / hbar

    @property
    def cooperativity(self) -> float:
        return self.rabi ** 2 / (self.gamma12 * self.gamma13)


class EitMapping:
    """Table of corresponding quantities; translating twice is the identity."""

    PAIRS = (
        ("sigma13", "A_minus"),
        ("sigma12", "X"),
        ("hbar_omega21", "hbar_Omega_m"),
        ("rabi_mu23_Ec_over_hbar", "Omega_c_2_g0_abar_xzpf"),
        ("gamma13", "kappa"),
        ("gamma12", "Gamma_m"),
    )

    def __init__(self):
        self._table = {}
        for eit_name, omit_name in self.PAIRS:
            self._table[eit_name] = omit_name
            self._table[omit_name] = eit_name

    def translate(self, name: str) -> str:
        return self._table[name]

    def translate_all(self, values: dict) -> dict:
        return {self.translate(k): v for k, v in values.items()}


def eit_coherence(p: LambdaSystemParams, delta_prime):
    """Steady-state probe coherence S13 at two-photon detuning ``delta_prime``."""
    delta_prime = np.asarray(delta_prime, dtype=float)
    drive = 1j * p.mu13 * p.field_p / (2 * hbar)
    return drive / (-1j * (delta_prime + p.control_detuning) + p.gamma13 / 2
                    + (p.rabi ** 2 / 4) / (-1j * delta_prime + p.gamma12 / 2))


def eit_polarizability(p: LambdaSystemParams, delta_prime):
    return p.mu13 * eit_coherence(p, delta_prime) / (p.field_p / 2)


def map_omit_to_eit(op: OperatingPoint, params: SystemParams,
                    dipole: float = REFERENCE_DIPOLE, probe_field: float = 1.0):
    """Lambda system whose S13 is proportional to the sideband-resolved A-.

    Returns ``(lambda_params, ratio)`` with ``S13 = ratio * A-`` for a
    unit probe amplitude on the optomechanical side. Optical frequencies
    of the returned system are given in a frame rotating at omega31.
    """
    mech = params.mechanics
    # optical frequencies enter only through differences; measuring them
    # from the 1-3 transition keeps the control detuning exact
    omega31 = 0.0
    omega21 = mech.omega_m
    omega32 = omega31 - omega21
    lam = LambdaSystemParams(
        omega21=omega21,
        omega31=omega31,
        mu13=dipole,
        mu23=dipole,
        gamma12=mech.gamma_m,
        gamma13=params.kappa,
        field_c=hbar * op.omega_c_rate / dipole,
        field_p=probe_field,
        # control detuning from 3-2 matches delta_bar + Omega_m
        omega_c_laser=omega32 + op.delta_bar + mech.omega_m,
        omega_p_laser=omega31,
    )
    ratio = 1j * dipole * probe_field / (2 * hbar * math.sqrt(params.eta_c * params.kappa))
    return lam, ratio


def map_eit_to_omit(lam: LambdaSystemParams, template: SystemParams):
    """Inverse of :func:`map_omit_to_eit`.

    The Lambda system fixes kappa, Gamma_m, Omega_m, Omega_c and the
    control detuning; mass, g0, eta_c and wavelength come from ``template``.
    """
    mech = replace(template.mechanics, omega_m=lam.omega21, gamma_m=lam.gamma12)
    cavity = CavityParams.from_total(lam.gamma13, template.eta_c,
                                     template.cavity.wavelength)
    params = replace(template, cavity=cavity, mechanics=mech)
    delta_bar = lam.control_detuning - lam.omega21

    x_zpf = math.sqrt(hbar / (2 * mech.m_eff * mech.omega_m))
    a_bar = lam.rabi / abs(2 * params.coupling.g0 * x_zpf)
    flux = a_bar ** 2 * abs(complex(cavity.kappa / 2, -delta_bar)) ** 2 / (
        cavity.eta_c * cavity.kappa)
    op = operating_point_from_flux(cavity, mech, params.coupling, delta_bar, flux)
    return op, params
