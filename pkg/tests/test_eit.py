import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import hbar

from conftest import GAMMA_M, KAPPA, OMEGA_M, make_system, op_at
from omit_sim import response
from omit_sim.eit import (EitMapping, LambdaSystemParams, eit_coherence, eit_polarizability,
                          map_eit_to_omit, map_omit_to_eit)


def test_mapping_table_is_involutive():
    table = EitMapping()
    for eit_name, omit_name in EitMapping.PAIRS:
        assert table.translate(eit_name) == omit_name
        assert table.translate(table.translate(eit_name)) == eit_name
    values = {"gamma13": 1.0, "gamma12": 2.0}
    assert table.translate_all(table.translate_all(values)) == values
    with pytest.raises(KeyError):
        table.translate("nonsense")


def test_lambda_params_validation():
    with pytest.raises(ValueError):
        LambdaSystemParams(1, 2, 1, 1, 0.0, 1.0, 1, 1, 0, 0)


def test_mapped_parameters(critical):
    op = op_at(critical, 2.0)
    lam, _ = map_omit_to_eit(op, critical)
    assert lam.gamma13 == KAPPA and lam.gamma12 == GAMMA_M and lam.omega21 == OMEGA_M
    assert lam.rabi == pytest.approx(op.omega_c_rate, rel=1e-14)
    assert lam.control_detuning == pytest.approx(op.delta_bar + OMEGA_M, abs=1e-6)
    assert lam.cooperativity == pytest.approx(2.0, rel=1e-13)


def test_no_control_gives_bare_lorentzians(critical):
    op = op_at(critical, 1e-300)
    lam, ratio = map_omit_to_eit(op, critical)
    dp = np.linspace(-3 * KAPPA, 3 * KAPPA, 1001)
    eit = eit_coherence(lam, dp)
    bare = 1j * lam.mu13 * lam.field_p / (2 * hbar) / (-1j * dp + KAPPA / 2)
    np.testing.assert_allclose(eit, bare, rtol=1e-12)
    np.testing.assert_allclose(ratio * response.response_rsb(op, critical, dp), bare, rtol=1e-12)


def test_polarizability_is_proportional(critical):
    op = op_at(critical, 1.0)
    lam, _ = map_omit_to_eit(op, critical, probe_field=2.0)
    dp = np.linspace(-1e6, 1e6, 5)
    np.testing.assert_allclose(eit_polarizability(lam, dp),
                               lam.mu13 * eit_coherence(lam, dp) / 1.0)


def test_transparency_at_two_photon_resonance(critical):
    op = op_at(critical, 10.0)
    lam, _ = map_omit_to_eit(op, critical)
    # on two-photon resonance the coherence is suppressed by 1 + C
    bare = lam.mu13 * lam.field_p / (hbar * KAPPA)
    assert abs(eit_coherence(lam, 0.0)) == pytest.approx(bare / 11, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(coop=st.floats(1e-2, 1e2), offset=st.floats(-1, 1), eta=st.floats(0.05, 0.95))
def test_round_trip_through_lambda_system(coop, offset, eta):
    system = make_system(eta=eta, kappa=0.1 * OMEGA_M)
    op = op_at(system, coop, -OMEGA_M + offset * system.kappa)
    lam, _ = map_omit_to_eit(op, system)
    op2, system2 = map_eit_to_omit(lam, system)
    assert system2.kappa == pytest.approx(system.kappa, rel=1e-14)
    assert system2.mechanics.gamma_m == system.mechanics.gamma_m
    assert op2.cooperativity == pytest.approx(op.cooperativity, rel=1e-12)
    assert op2.delta_bar == pytest.approx(op.delta_bar, rel=1e-12)
    dp = np.linspace(-5, 5, 11) * GAMMA_M * (1 + coop)
    np.testing.assert_allclose(response.response_rsb(op2, system2, dp),
                               response.response_rsb(op, system, dp), rtol=1e-11)


@settings(max_examples=50, deadline=None)
@given(coop=st.floats(1e-3, 1e3), offset=st.floats(-2, 2))
def test_pointwise_equivalence(coop, offset):
    system = make_system(eta=0.3)
    op = op_at(system, coop, -OMEGA_M + offset * KAPPA)
    lam, ratio = map_omit_to_eit(op, system)
    dp = np.linspace(-10, 10, 201) * GAMMA_M * (1 + coop)
    np.testing.assert_allclose(eit_coherence(lam, dp),
                               ratio * response.response_rsb(op, system, dp), rtol=1e-12)
