import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omit_sim.fitting import fit_lorentzian, initial_guess, lorentzian


def test_exact_dip_recovered():
    x = np.linspace(-10, 10, 801)
    y = lorentzian(x, 1.3, 2.5, 0.7, 1.0)
    fit = fit_lorentzian(x, y)
    assert fit.converged and fit.fwhm_constrained
    assert fit.center == pytest.approx(1.3, abs=1e-10)
    assert fit.fwhm == pytest.approx(2.5, rel=1e-10)
    assert fit.depth == pytest.approx(0.7, rel=1e-10)
    assert fit.baseline == pytest.approx(1.0, rel=1e-10)
    assert fit.extremum == pytest.approx(0.3, rel=1e-9)
    assert fit.rms_residual < 1e-12


def test_peak_has_negative_depth():
    x = np.linspace(-5, 5, 401)
    fit = fit_lorentzian(x, lorentzian(x, 0.0, 1.0, -2.0, 0.1))
    assert fit.depth == pytest.approx(-2.0, rel=1e-9)
    assert fit.extremum == pytest.approx(2.1, rel=1e-9)


def test_narrow_line_needs_half_max_start():
    x = np.linspace(-1, 1, 2001)
    y = lorentzian(x, 0.1, 0.04, 1.0, 1.0)
    fit = fit_lorentzian(x, y)
    assert fit.converged
    assert fit.fwhm == pytest.approx(0.04, rel=1e-8)


def test_noisy_data_close_to_truth():
    rng = np.random.default_rng(3)
    x = np.linspace(-10, 10, 1001)
    y = lorentzian(x, -0.5, 3.0, 0.8, 1.0) + rng.normal(0, 0.01, x.size)
    fit = fit_lorentzian(x, y)
    assert fit.fwhm == pytest.approx(3.0, rel=0.03)
    assert fit.center == pytest.approx(-0.5, abs=0.05)
    assert fit.rms_residual == pytest.approx(0.01, rel=0.1)


def test_unsorted_input_gives_same_fit():
    x = np.linspace(-10, 10, 201)
    y = lorentzian(x, 0.2, 2.0, 0.5, 1.0)
    perm = np.random.default_rng(0).permutation(x.size)
    a, b = fit_lorentzian(x, y), fit_lorentzian(x[perm], y[perm])
    assert a.fwhm == pytest.approx(b.fwhm, rel=1e-12)


def test_flat_data_is_unconstrained():
    x = np.linspace(0, 1, 50)
    fit = fit_lorentzian(x, np.full_like(x, 3.0))
    assert not fit.fwhm_constrained
    assert fit.baseline == pytest.approx(3.0)


def test_explicit_start():
    x = np.linspace(-10, 10, 401)
    y = lorentzian(x, 0.0, 1.0, 1.0, 0.0)
    fit = fit_lorentzian(x, y, p0=(0.5, 2.0, 0.5, 0.1))
    assert fit.fwhm == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("x,y", [
    (np.arange(4.0), np.arange(4.0)),
    (np.arange(6.0), np.arange(5.0)),
    (np.array([0, 1, 2, 3, np.nan]), np.zeros(5)),
    (np.zeros(6), np.arange(6.0)),
])
def test_bad_input_rejected(x, y):
    with pytest.raises(ValueError):
        fit_lorentzian(x, y)


def test_initial_guess_picks_dominant_extremum():
    x = np.linspace(-1, 1, 101)
    y = lorentzian(x, 0.3, 0.2, 0.9, 1.0)
    c, w, d, b = initial_guess(x, y)
    assert c == pytest.approx(0.3, abs=0.02) and d > 0 and w == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(center=st.floats(-0.5, 0.5), width=st.floats(0.05, 1.0), depth=st.floats(0.05, 1.0),
       scale=st.sampled_from([1e-6, 1.0, 1e6, 2 * np.pi * 5e7]),
       shift=st.floats(-1e3, 1e3))
def test_fit_is_scale_equivariant(center, width, depth, scale, shift):
    x = np.linspace(-2, 2, 501)
    y = lorentzian(x, center, width, depth, 1.0)
    base = fit_lorentzian(x, y)
    moved = fit_lorentzian(x * scale + shift * scale, y)
    assert moved.fwhm == pytest.approx(base.fwhm * scale, rel=1e-8)
    assert moved.center == pytest.approx(base.center * scale + shift * scale,
                                         rel=1e-8, abs=1e-8 * scale)
    assert moved.depth == pytest.approx(base.depth, rel=1e-8)
