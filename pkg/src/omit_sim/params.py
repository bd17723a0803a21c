"""Physical parameter containers.

All angular frequencies are in rad/s, lengths in m, masses in kg and
powers in W. Config-level values quoted as ``f/2pi`` in Hz are converted
exactly once, in :mod:`omit_sim.config`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ParameterError


def _finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class CavityParams:
    """Optical mode: intrinsic loss ``kappa0``, waveguide coupling ``kappa_ex``."""

    kappa0: float
    kappa_ex: float
    wavelength: float = 775e-9

    def __post_init__(self):
        for name in ("kappa0", "kappa_ex", "wavelength"):
            _finite(name, getattr(self, name))
        if self.kappa0 <= 0:
            raise ParameterError(f"kappa0 must be > 0, got {self.kappa0!r}")
        if self.kappa_ex < 0:
            raise ParameterError(f"kappa_ex must be >= 0, got {self.kappa_ex!r}")
        if self.wavelength <= 0:
            raise ParameterError(f"wavelength must be > 0, got {self.wavelength!r}")

    @property
    def kappa(self) -> float:
        return self.kappa0 + self.kappa_ex

    @property
    def eta_c(self) -> float:
        return self.kappa_ex / self.kappa

    @classmethod
    def from_total(cls, kappa: float, eta_c: float, wavelength: float = 775e-9):
        """Build from total linewidth and coupling parameter."""
        if not 0 <= eta_c < 1:
            raise ParameterError(f"eta_c must lie in [0, 1), got {eta_c!r}")
        return cls(kappa0=float(kappa * (1 - eta_c)), kappa_ex=float(kappa * eta_c),
                   wavelength=float(wavelength))

    def with_eta(self, eta_c: float) -> "CavityParams":
        """Same total linewidth, different coupling parameter."""
        return CavityParams.from_total(self.kappa, eta_c, self.wavelength)


@dataclass(frozen=True)
class MechanicalParams:
    m_eff: float
    omega_m: float
    gamma_m: float

    def __post_init__(self):
        for name in ("m_eff", "omega_m", "gamma_m"):
            value = getattr(self, name)
            _finite(name, value)
            if value <= 0:
                raise ParameterError(f"{name} must be > 0, got {value!r}")

    @property
    def q_factor(self) -> float:
        return self.omega_m / self.gamma_m


@dataclass(frozen=True)
class CouplingParams:
    """Frequency pull ``g0 = d omega_c / dx`` in rad/s per m; 0 is a bare cavity."""

    g0: float

    def __post_init__(self):
        _finite("g0", self.g0)


@dataclass(frozen=True)
class DriveParams:
    """Control laser and probe modulation.

    ``detuning`` is the effective (post static shift) control detuning,
    ``probe_offset`` the modulation frequency omega_p - omega_l.
    ``lo_phase`` is the homodyne local-oscillator phase in rad.
    """

    input_power: float
    detuning: float
    probe_offset: float = 0.0
    modulation_depth: float = 0.0
    lo_phase: float = 0.0

    def __post_init__(self):
        for name in ("input_power", "detuning", "probe_offset",
                     "modulation_depth", "lo_phase"):
            _finite(name, getattr(self, name))
        if self.input_power < 0:
            raise ParameterError(f"input_power must be >= 0, got {self.input_power!r}")
        if self.modulation_depth < 0:
            raise ParameterError(
                f"modulation_depth must be >= 0, got {self.modulation_depth!r}")


@dataclass(frozen=True)
class SystemParams:
    """One optomechanical device.

    ``gamma_split`` is the cw/ccw backscattering rate (rad/s) and
    ``taper_loss_factor`` an empirical reduction of the coupling rate.
    Both are ignored by the single-mode model functions; use
    :meth:`single_mode` to fold them in.
    """

    cavity: CavityParams
    mechanics: MechanicalParams
    coupling: CouplingParams
    gamma_split: float = 0.0
    taper_loss_factor: float = 1.0

    def __post_init__(self):
        _finite("gamma_split", self.gamma_split)
        _finite("taper_loss_factor", self.taper_loss_factor)
        if self.gamma_split < 0:
            raise ParameterError(f"gamma_split must be >= 0, got {self.gamma_split!r}")
        if self.taper_loss_factor < 1:
            raise ParameterError(
                f"taper_loss_factor must be >= 1, got {self.taper_loss_factor!r}")

    @property
    def kappa(self) -> float:
        return self.cavity.kappa

    @property
    def eta_c(self) -> float:
        return self.cavity.eta_c

    @property
    def mode_split(self) -> bool:
        return self.gamma_split > 0

    def single_mode(self) -> "SystemParams":
        """Effective single-mode device seen by the near-resonant stationary mode.

        With backscattering the coupling parameter halves; the taper loss
        factor is kept and applied to the input power by the harness.
        """
        if not self.mode_split:
            return self
        return replace(self, cavity=self.cavity.with_eta(self.eta_c / 2),
                       gamma_split=0.0)
