import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wgqed import waveguide as wg
from wgqed.errors import (
    DivergentCooperativity,
    DivergentSaturation,
    InconsistentParameters,
    UnsupportedInFormula,
)

# constants written out so the oracle does not share code with the package
PLANCK = 6.62607015e-34
LIGHT = 299792458.0
GAMMA = 2 * np.pi * 26.7e6


def params(beta, gd=0.0):
    return wg.EmitterWaveguideParams(beta=beta, gamma_total=GAMMA, gamma_dephasing=gd)


# --- transmission --------------------------------------------------------------

def test_full_extinction_at_unit_beta():
    assert wg.transmission(params(1.0), wg.DriveParams(0.0, 0.0)) == pytest.approx(0.0, abs=1e-15)


def test_low_power_transmission_at_fitted_beta():
    T = wg.transmission(params(0.143), wg.DriveParams(0.0, 0.0))
    assert T == pytest.approx(0.734449, abs=1e-12)
    assert 1 - T == pytest.approx(0.265551, abs=1e-12)


@pytest.mark.parametrize("beta", [0.01, 0.143, 0.5, 1.0])
def test_far_detuned_transparency(beta):
    T = wg.transmission(params(beta), wg.DriveParams(0.0, 50 * GAMMA))
    assert T > 0.999


def test_dephasing_rejected_in_transmission():
    with pytest.raises(UnsupportedInFormula):
        wg.transmission(params(0.1, gd=1.0), wg.DriveParams())


@given(st.floats(0, 1), st.floats(0, 100), st.floats(-20, 20))
def test_lorentzian_dip_matches_modulus(beta, sat, x):
    w = x * GAMMA
    a = wg.transmission_from_saturation(beta, sat, w, GAMMA)
    b = wg.transmission_dip(beta, sat, w, GAMMA)
    assert abs(a - b) <= 1e-12


@given(st.floats(0.01, 1), st.floats(0, 10))
def test_transmission_minimum_on_resonance(beta, sat):
    grid = np.linspace(-5, 5, 101) * GAMMA
    T = wg.transmission_from_saturation(beta, sat, grid, GAMMA)
    assert np.argmin(T) == 50
    a = beta / (1 + sat)
    assert T.min() == pytest.approx((1 - a) ** 2, abs=1e-12)
    assert np.all(T <= 1 + 1e-15)


def test_params_invariants():
    with pytest.raises(ValueError):
        wg.EmitterWaveguideParams(beta=1.2, gamma_total=1.0)
    with pytest.raises(ValueError):
        wg.EmitterWaveguideParams(beta=0.1, gamma_total=0.0)
    with pytest.raises(ValueError):
        wg.DriveParams(mean_photon_number=-1)
    assert wg.ReflectionParams(0.5, 7.0, 1.0).phi_canonical == pytest.approx(7.0 - 2 * np.pi)


# --- contrast ---------------------------------------------------------------

def test_contrast_values():
    assert wg.transmission_contrast(0.143) == pytest.approx(0.265551, abs=1e-12)
    assert wg.transmission_contrast(0.0) == 0.0
    assert wg.transmission_contrast(0.143, GAMMA / 2, GAMMA) == pytest.approx(0.1327755, abs=1e-9)


def test_contrast_monotonic():
    b = np.linspace(0, 1, 201)
    assert np.all(np.diff(wg.transmission_contrast(b)) > 0)
    gd = np.linspace(0, 5, 51) * GAMMA
    assert np.all(np.diff(wg.transmission_contrast(0.3, gd, GAMMA)) < 0)


@given(st.floats(0, 1))
def test_contrast_beta_round_trip(beta):
    c = wg.transmission_contrast(beta)
    assert abs(wg.transmission_contrast(wg.beta_from_contrast(c)) - c) <= 1e-12


# --- reflection -------------------------------------------------------------

def test_reflection_examples():
    w = np.linspace(-3, 3, 7) * GAMMA
    np.testing.assert_allclose(wg.reflection(wg.ReflectionParams(0.0, 1.0, GAMMA), w), 1.0)
    assert wg.reflection(wg.ReflectionParams(1.0, 0.0, GAMMA), 0.0) == pytest.approx(4.0)
    assert wg.reflection(wg.ReflectionParams(1.0, np.pi, GAMMA), 0.0) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(0, 3), st.floats(0, 2 * np.pi), st.floats(-10, 10))
def test_reflection_conjugation_symmetry(xi, phi, x):
    w = x * GAMMA
    a = wg.reflection(wg.ReflectionParams(xi, phi, GAMMA), w)
    b = wg.reflection(wg.ReflectionParams(xi, np.mod(-phi, 2 * np.pi), GAMMA), -w)
    assert abs(a - b) <= 1e-12


def test_reflection_far_detuned_limit():
    R = wg.reflection(wg.ReflectionParams(0.8, 1.0, GAMMA), 1e6 * GAMMA)
    assert R == pytest.approx(1.0, abs=1e-5)


# --- saturation numbers -------------------------------------------------------

def test_critical_photon_number():
    assert wg.critical_photon_number(0.143) == pytest.approx(12.23, abs=0.005)
    assert wg.critical_photon_number(0.5) == pytest.approx(1.0)
    assert wg.critical_photon_number(1.0) == pytest.approx(0.25)
    with pytest.raises(DivergentSaturation):
        wg.critical_photon_number(0.0)


def _eta_oracle(P_c, n_c, rate, wavelength):
    return PLANCK * (LIGHT / wavelength) * n_c * rate / P_c


def test_coupling_efficiency_hz_reading():
    n_c = 1 / (4 * 0.143**2)
    eta = wg.coupling_efficiency_from_critical_power(0.32e-9, n_c, 26.7e6, LIGHT / 619e-9)
    assert eta == pytest.approx(_eta_oracle(0.32e-9, n_c, 26.7e6, 619e-9), rel=1e-9)
    assert eta == pytest.approx(0.33, abs=0.02)


def test_coupling_efficiency_doubling_power_halves():
    args = (12.23, 26.7e6, LIGHT / 619e-9)
    a = wg.coupling_efficiency_from_critical_power(0.32e-9, *args)
    b = wg.coupling_efficiency_from_critical_power(0.64e-9, *args)
    assert b == pytest.approx(a / 2, rel=1e-12)


def test_coupling_efficiency_angular_reading_rejected():
    # the angular rate 1/5.91 ns gives eta ~ 2.07
    assert _eta_oracle(0.32e-9, 12.23, 1 / 5.91e-9, 619e-9) == pytest.approx(2.07, abs=0.01)
    with pytest.raises(InconsistentParameters):
        wg.coupling_efficiency_from_critical_power(
            0.32e-9, 12.23, 26.7e6, LIGHT / 619e-9, linewidth_unit="angular")


# --- cooperativity ------------------------------------------------------------

def test_cooperativity():
    assert wg.cooperativity(0.143) == pytest.approx(0.166861, abs=1e-6)
    assert wg.cooperativity(0.5) == pytest.approx(1.0)
    with pytest.raises(DivergentCooperativity):
        wg.cooperativity(1.0)
    assert wg.cavity_g_from_cooperativity(1.0, 100.0, 1.0) == pytest.approx(5.0)


# --- resonant g2 --------------------------------------------------------------

def test_resonant_g2_limits():
    G, W = 1.68e8, 2 * np.pi * 60e6
    assert wg.resonant_g2(0.0, G, W, 0.03) == pytest.approx(0.03, abs=1e-15)
    assert wg.resonant_g2(1e-6, G, W, 0.03) == pytest.approx(1.03, abs=1e-12)


def test_resonant_g2_even_and_closed_form():
    G, W = 1.0, 2.3
    t = np.linspace(0, 8, 50)
    direct = 1 - np.exp(-0.75 * G * t) * (np.cos(W * t) + 0.75 * G / W * np.sin(W * t)) + 0.1
    np.testing.assert_allclose(wg.resonant_g2(t, G, W, 0.1), direct, atol=1e-14)
    np.testing.assert_allclose(wg.resonant_g2(-t, G, W, 0.1), direct, atol=1e-14)


def test_resonant_g2_zero_rabi_limit():
    t = np.linspace(0, 6, 40)
    series = 1 - np.exp(-0.75 * t) * (1 + 0.75 * t)
    np.testing.assert_allclose(wg.resonant_g2(t, 1.0, 0.0), series, atol=1e-15)
    np.testing.assert_allclose(wg.resonant_g2(t, 1.0, 1e-7), series, atol=1e-12)


@given(st.floats(0.1, 5), st.floats(0.01, 5), st.floats(-1, 1))
def test_resonant_g2_jacobian_matches_finite_differences(G, W, c):
    t = np.linspace(0, 6, 25)
    J = wg.resonant_g2_jacobian(t, G, W, c)
    h = 1e-6
    num = np.column_stack([
        (wg.resonant_g2(t, G + h, W, c) - wg.resonant_g2(t, G - h, W, c)) / (2 * h),
        (wg.resonant_g2(t, G, W + h, c) - wg.resonant_g2(t, G, W - h, c)) / (2 * h),
        np.ones_like(t),
    ])
    np.testing.assert_allclose(J, num, atol=1e-6)


# --- conversions -------------------------------------------------------------

def test_lifetime_conversions():
    r = wg.lifetime_linewidth_conversions(lifetime=5.91e-9)
    assert r["decay_rate"] == pytest.approx(1.69205e8, rel=1e-5)
    assert r["linewidth"] / 1e6 == pytest.approx(26.93, abs=0.01)
    assert wg.lifetime_linewidth_conversions(decay_rate=2 * np.pi)["linewidth"] == pytest.approx(1.0)


@given(st.floats(1e-12, 1e-3))
def test_conversion_round_trip(lifetime):
    r = wg.lifetime_linewidth_conversions(lifetime=lifetime)
    back = wg.lifetime_linewidth_conversions(linewidth=r["linewidth"])
    assert back["lifetime"] == pytest.approx(lifetime, rel=1e-12)


def test_conversion_needs_one_argument():
    with pytest.raises(ValueError):
        wg.lifetime_linewidth_conversions()
    with pytest.raises(ValueError):
        wg.lifetime_linewidth_conversions(lifetime=1.0, linewidth=1.0)


def test_saturation_contrast_low_power_limit():
    assert wg.saturation_contrast(1e-12, 0.143, 0.32) == pytest.approx(wg.transmission_contrast(0.143), rel=1e-9)
    # 1 - T(0) expands to beta (2 - beta + 2x) / (1 + x)^2
    x = 0.7
    assert wg.saturation_contrast(x * 0.32, 0.143, 0.32) == pytest.approx(
        0.143 * (2 - 0.143 + 2 * x) / (1 + x) ** 2, rel=1e-12)
