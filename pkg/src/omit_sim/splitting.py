"""Backscattering-coupled counterpropagating modes.

Only the ccw mode couples to the waveguide. The intermode rate ``gamma``
mixes cw and ccw into stationary modes ``a_+- = (a_ccw +- a_cw)/sqrt(2)``
which sit at laser detunings ``Delta +- gamma/2`` and each couple with
half the original coupling parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .params import CavityParams


@dataclass(frozen=True)
class SplitModeParams:
    gamma_split: float
    base: CavityParams

    def __post_init__(self):
        if not self.gamma_split >= 0:
            raise ParameterError(f"gamma_split must be >= 0, got {self.gamma_split!r}")


@dataclass(frozen=True)
class EffectiveMode:
    """One stationary mode viewed as an ordinary single-mode cavity."""

    label: str
    detuning: float
    cavity: CavityParams


def stationary_modes(p: SplitModeParams, laser_detuning: float):
    """The ``+`` and ``-`` stationary modes for a bare laser detuning."""
    cavity = p.base.with_eta(p.base.eta_c / 2)
    half = p.gamma_split / 2
    return (EffectiveMode("+", laser_detuning + half, cavity),
            EffectiveMode("-", laser_detuning - half, cavity))


def near_resonant_mode(p: SplitModeParams, laser_detuning: float) -> EffectiveMode:
    return min(stationary_modes(p, laser_detuning), key=lambda m: abs(m.detuning))


def to_stationary(a_ccw, a_cw):
    s = 1 / math.sqrt(2)
    return s * (a_ccw + a_cw), s * (a_ccw - a_cw)


def to_propagating(a_plus, a_minus):
    s = 1 / math.sqrt(2)
    return s * (a_plus + a_minus), s * (a_plus - a_minus)


def split_mode_amplitudes(p: SplitModeParams, detuning, drive=1.0):
    """Steady-state (a_ccw, a_cw) of the bare doublet for input amplitude ``drive``.

    ``detuning`` is the laser detuning from the unsplit resonance.
    """
    kappa = p.base.kappa
    gain = math.sqrt(p.base.eta_c * kappa / 2) * drive
    detuning = np.asarray(detuning, dtype=float)
    a_plus = gain / (-1j * (detuning + p.gamma_split / 2) + kappa / 2)
    a_minus = gain / (-1j * (detuning - p.gamma_split / 2) + kappa / 2)
    return to_propagating(a_plus, a_minus)


def split_cavity_transmission(p: SplitModeParams, detuning):
    """Amplitude transmission of the bare doublet (no optomechanics)."""
    a_ccw, _ = split_mode_amplitudes(p, detuning)
    return 1 - math.sqrt(p.base.eta_c * p.base.kappa) * a_ccw


def radiation_pressure_photons(a_plus, a_minus):
    """Photon number driving the breathing mode; the cw/ccw cross term does not."""
    return np.abs(a_plus) ** 2 + np.abs(a_minus) ** 2


def infer_eta_from_residual(residual_power_transmission: float) -> float:
    """Undercoupled effective coupling parameter from |t_r|^2 = (1 - 2 eta')^2."""
    r = residual_power_transmission
    if not 0 <= r <= 1:
        raise ParameterError(f"residual transmission must lie in [0, 1], got {r!r}")
    return (1 - math.sqrt(r)) / 2


def effective_coupling_rate_correction(omega_c_nominal: float,
                                       taper_loss_factor: float = 1.0,
                                       mode_split: bool = False) -> float:
    """Coupling rate after halving eta (if split) and the empirical taper loss.

    Omega_c scales with the intracavity amplitude, i.e. with sqrt(eta_c).
    """
    if taper_loss_factor < 1:
        raise ParameterError(f"taper_loss_factor must be >= 1, got {taper_loss_factor!r}")
    scale = 1 / taper_loss_factor
    if mode_split:
        scale /= math.sqrt(2)
    return omega_c_nominal * scale
