import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GAMMA_M, G0, KAPPA, M_EFF, OMEGA_M, make_system
from oracles import two_mode_transmission
from omit_sim import response
from omit_sim.errors import ParameterError
from omit_sim.harness import device_operating_point, input_flux
from omit_sim.params import CavityParams, DriveParams
from omit_sim.splitting import (SplitModeParams, effective_coupling_rate_correction,
                                infer_eta_from_residual, near_resonant_mode,
                                radiation_pressure_photons, split_cavity_transmission,
                                split_mode_amplitudes, stationary_modes, to_propagating,
                                to_stationary)


def test_residual_inversion():
    assert infer_eta_from_residual(0.5) == pytest.approx((2 - math.sqrt(2)) / 4, abs=1e-15)
    assert infer_eta_from_residual(1.0) == 0.0
    assert infer_eta_from_residual(0.0) == 0.5
    with pytest.raises(ParameterError):
        infer_eta_from_residual(1.5)


@settings(max_examples=100)
@given(eta=st.floats(0, 0.5))
def test_residual_round_trip(eta):
    assert infer_eta_from_residual((1 - 2 * eta) ** 2) == pytest.approx(eta, abs=1e-12)


@settings(max_examples=100)
@given(re1=st.floats(-10, 10), im1=st.floats(-10, 10), re2=st.floats(-10, 10),
       im2=st.floats(-10, 10))
def test_basis_change_is_unitary(re1, im1, re2, im2):
    a, b = complex(re1, im1), complex(re2, im2)
    p, m = to_stationary(a, b)
    assert abs(p) ** 2 + abs(m) ** 2 == pytest.approx(abs(a) ** 2 + abs(b) ** 2, rel=1e-12, abs=1e-12)
    back = to_propagating(p, m)
    assert back[0] == pytest.approx(a, abs=1e-12)
    assert back[1] == pytest.approx(b, abs=1e-12)
    assert radiation_pressure_photons(p, m) == pytest.approx(abs(a) ** 2 + abs(b) ** 2,
                                                             rel=1e-12, abs=1e-12)


def test_stationary_modes():
    base = CavityParams.from_total(KAPPA, 0.3)
    p = SplitModeParams(20 * KAPPA, base)
    plus, minus = stationary_modes(p, -OMEGA_M)
    assert plus.detuning == pytest.approx(-OMEGA_M + 10 * KAPPA)
    assert minus.detuning == pytest.approx(-OMEGA_M - 10 * KAPPA)
    assert plus.cavity.eta_c == pytest.approx(0.15)
    assert near_resonant_mode(p, -10 * KAPPA).label == "+"
    with pytest.raises(ParameterError):
        SplitModeParams(-1.0, base)


def test_split_doublet_has_two_dips():
    base = CavityParams.from_total(KAPPA, 0.5)
    p = SplitModeParams(20 * KAPPA, base)
    det = np.linspace(-20 * KAPPA, 20 * KAPPA, 4001)
    power = np.abs(split_cavity_transmission(p, det)) ** 2
    minima = det[1:-1][(power[1:-1] < power[:-2]) & (power[1:-1] < power[2:])]
    np.testing.assert_allclose(np.sort(np.abs(minima)), [10 * KAPPA, 10 * KAPPA], rtol=2e-3)
    # each stationary mode dips to (1 - 2 eta/2)^2
    assert power.min() == pytest.approx((1 - 0.5) ** 2, abs=5e-3)


def test_unsplit_doublet_is_single_mode():
    base = CavityParams.from_total(KAPPA, 0.3)
    p = SplitModeParams(0.0, base)
    det = np.linspace(-3 * KAPPA, 3 * KAPPA, 101)
    expected = 1 - 0.3 * KAPPA / (-1j * det + KAPPA / 2)
    np.testing.assert_allclose(split_cavity_transmission(p, det), expected, rtol=1e-13)
    a_ccw, a_cw = split_mode_amplitudes(p, det)
    np.testing.assert_allclose(a_cw, 0.0, atol=1e-20)


def test_coupling_rate_correction():
    assert effective_coupling_rate_correction(1.0) == 1.0
    assert effective_coupling_rate_correction(1.0, 1.9) == pytest.approx(1 / 1.9)
    assert effective_coupling_rate_correction(1.0, 1.0, True) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ParameterError):
        effective_coupling_rate_correction(1.0, 0.9)


def test_harness_correction_matches_rate_scaling():
    # taper factor on the input flux is the same as dividing Omega_c by the factor
    plain = make_system(eta=0.3)
    tapered = make_system(eta=0.3, taper=1.9)
    drive = DriveParams(1e-3, -OMEGA_M)
    ratio = (device_operating_point(tapered, drive).omega_c_rate
             / device_operating_point(plain, drive).omega_c_rate)
    assert ratio == pytest.approx(effective_coupling_rate_correction(1.0, 1.9))


@pytest.mark.parametrize("gamma_ratio,tol", [(20, 1e-2), (200, 1e-3)])
def test_two_mode_reduction_improves_with_splitting(gamma_ratio, tol):
    eta = 0.3
    system = make_system(eta=eta, gamma_split=gamma_ratio * KAPPA)
    drive = DriveParams(2e-3, -OMEGA_M)
    op = device_operating_point(system, drive)
    eff = system.single_mode()
    width = response.omit_width(op, eff)
    omega = OMEGA_M + np.linspace(-5 * width, 5 * width, 101)
    reduced = np.abs(response.transmission(op, eff, omega).t_p) ** 2
    brute = np.abs(two_mode_transmission(KAPPA, eta, gamma_ratio * KAPPA, M_EFF, OMEGA_M,
                                          GAMMA_M, G0, input_flux(system, 2e-3),
                                          -OMEGA_M + gamma_ratio * KAPPA / 2, omega)) ** 2
    assert np.max(np.abs(reduced - brute) / brute) < tol
