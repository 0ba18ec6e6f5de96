import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from wgqed import estimation as est
from wgqed import master_equation as me
from wgqed import waveguide as wg
from wgqed.errors import (
    CalibrationError,
    ConfigError,
    DarkChannelError,
    LossyCavityWarning,
    TruncationError,
)

BETA = 0.143


@pytest.fixture(scope="module")
def cfg():
    return me.default_config(BETA)


@pytest.fixture(scope="module")
def lab(cfg):
    return me.build_system(cfg)


def gamma_total(beta, gamma=1.0):
    return gamma * (1 + wg.cooperativity(beta))


# --- structure ---------------------------------------------------------------

def test_hamiltonian_hermitian_and_three_jumps(lab):
    assert lab.hamiltonian.is_hermitian(1e-10)
    assert len(lab.jumps) == 3
    for term in lab.terms.values():
        assert term.is_hermitian(1e-10)
    total = sum(t.matrix for t in lab.terms.values())
    np.testing.assert_allclose(total, lab.hamiltonian.matrix, atol=0)


def test_capped_space_dimension(lab):
    assert lab.space.dim == 27 and lab.space.full_dim == 54


def test_all_couplings_zero_spectrum():
    with pytest.warns(LossyCavityWarning):
        cfg = me.ThreeModeConfig(kappa_in=0, kappa_out=0, v_in=0, v_out=0, omega_e=1.5, omega_c=0.7)
    H = me.build_system(cfg).hamiltonian.matrix
    space = me.build_system(cfg).space
    levels = np.array(np.unravel_index(space._keep, space.dims)).T
    expected = 1.5 * levels[:, 0] + 0.7 * levels[:, 1:].sum(axis=1)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(H)), np.sort(expected), atol=1e-12)


def test_config_validation():
    with pytest.raises(ConfigError):
        me.ThreeModeConfig(g=-1)
    with pytest.raises(ConfigError):
        me.ThreeModeConfig(fock_cutoff=2)
    with pytest.raises(ConfigError):
        me.ThreeModeConfig(emitter_jump="other")
    with pytest.warns(LossyCavityWarning):
        me.ThreeModeConfig(v_in=5.0)


def test_vacuum_rabi_oscillation():
    g = 3.0
    cfg = me.ThreeModeConfig(g=g)
    sys_ = me.build_system(cfg)
    H = sys_.terms["H_JC"].matrix
    psi0 = sys_.space.basis_state((0, 1, 0, 0))
    P = sys_.operators["excited"].matrix
    t = np.linspace(0, 2, 41)
    pe = np.array([np.real(np.conj(p) @ P @ p) for p in (expm(-1j * H * ti) @ psi0 for ti in t)])
    # population oscillates at 2g
    np.testing.assert_allclose(pe, np.sin(g * t) ** 2, atol=1e-12)


# --- calibration ---------------------------------------------------------------

def test_calibrated_empty_cavity_does_not_leak(cfg):
    empty = me.build_system(cfg.replace(g=0.0))
    rho = empty.steady_state()
    n_in = (empty.operators["a_in"].dag() @ empty.operators["a_in"]).expect(rho).real
    n_out = (empty.operators["a_out"].dag() @ empty.operators["a_out"]).expect(rho).real
    assert n_out / n_in <= 1e-10


def test_default_multiplier(cfg):
    assert cfg.cross_coupling_scale == pytest.approx(1 / 3, rel=1e-10)
    assert me.effective_cavity_linewidth(cfg) == pytest.approx(5400.0, rel=1e-10)
    assert cfg.g == pytest.approx(15.0087, abs=1e-4)
    assert me.cooperativity_of(cfg) == pytest.approx(wg.cooperativity(BETA), rel=1e-12)


def test_multiplier_independent_of_drive():
    base = me.ThreeModeConfig(drive_amplitude=0.1)
    m1 = me.calibrate_cross_coupling(base).cross_coupling_scale
    m2 = me.calibrate_cross_coupling(base.replace(drive_amplitude=0.2)).cross_coupling_scale
    assert abs(m1 - m2) <= 1e-6 * m1


def test_multiplier_broadband_for_wide_cavity():
    kappa = 1000.0
    v = np.sqrt(50 * kappa)
    base = me.ThreeModeConfig(kappa_in=kappa, kappa_out=kappa, v_in=v, v_out=v, drive_amplitude=1.0)
    m0 = me.calibrate_cross_coupling(base).cross_coupling_scale
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        m10 = me.calibrate_cross_coupling(base.replace(omega=-10.0)).cross_coupling_scale
    assert abs(m10 - m0) <= 1e-4 * m0


def test_off_resonance_calibration_warns():
    with pytest.warns(RuntimeWarning):
        me.calibrate_cross_coupling(me.ThreeModeConfig(drive_amplitude=1.0, omega=-10.0))


def test_calibration_without_root_raises():
    with pytest.raises(CalibrationError):
        me.calibrate_cross_coupling(me.ThreeModeConfig(drive_amplitude=1.0), bracket=(0.5, 10.0))


# --- spectra -----------------------------------------------------------------

def test_empty_network_spectrum_is_flat(cfg):
    grid = np.linspace(-5, 5, 11)
    tr = me.spectrum_sweep(cfg.replace(g=0.0), grid)
    np.testing.assert_allclose(tr.values, 1.0, atol=1e-12)
    far = me.spectrum_sweep(cfg.replace(g=0.0), grid, baseline="far")
    np.testing.assert_allclose(far.values, 1.0, atol=1e-2)


def test_resonant_transmission_matches_extinction(cfg):
    T0 = me.spectrum_sweep(cfg, [0.0]).values[0]
    assert T0 == pytest.approx(0.7344, rel=0.01)


def test_transmission_matches_closed_form(cfg):
    gt = gamma_total(BETA)
    grid = np.linspace(-5, 5, 21) * gt
    num = me.spectrum_sweep(cfg, grid).values
    ref = wg.transmission_from_saturation(BETA, 1e-3, grid, gt)
    assert np.max(np.abs(num - ref)) <= 0.01


def test_weak_drive_linearity(cfg):
    grid = np.linspace(-3, 3, 7)
    a = me.spectrum_sweep(cfg, grid).values
    b = me.spectrum_sweep(cfg.replace(drive_amplitude=cfg.drive_amplitude / 2), grid).values
    assert np.max(np.abs(a - b) / a) < 1e-3


def test_psb_linewidth_is_total_decay(cfg):
    gt = gamma_total(BETA)
    grid = np.linspace(-4, 4, 41) * gt
    tr = me.spectrum_sweep(cfg, grid, channel="psb")
    fit = est.fit_lorentzian(tr)
    assert fit["fwhm"] == pytest.approx(gt, rel=0.02)


def test_unknown_channel(cfg):
    with pytest.raises(ConfigError):
        me.spectrum_sweep(cfg, [0.0], channel="X")


# --- displaced frame ---------------------------------------------------------------

@pytest.mark.parametrize("alpha", [1e-3, 1e-3j, 0.01])
def test_displacement_shifts_reflection_amplitude(lab, alpha):
    d = me.displaced_frame(lab, alpha)
    assert abs(d.expect("R") - lab.expect("a_out") - alpha) <= 1e-8


def test_displacement_round_trip(lab):
    back = me.displaced_frame(me.displaced_frame(lab, 0.02 - 0.01j), -(0.02 - 0.01j))
    np.testing.assert_allclose(back.hamiltonian.matrix, lab.hamiltonian.matrix, atol=1e-8)
    assert back.frame == "lab"


def test_matrix_displacement_agrees_on_observables(cfg):
    a = me.build_system(cfg, 1e-3)
    b = me.build_system(cfg, 1e-3, displacement="matrix")
    assert abs(a.expect("R") - b.expect("R")) <= 1e-8


def test_alpha_for_reflection_phase(cfg):
    s = me.scattered_output_amplitude(cfg)
    alpha = me.alpha_for_reflection(cfg, 0.5, 1.0)
    assert s / alpha == pytest.approx(0.5 * np.exp(1j), rel=1e-12)
    with pytest.raises(ConfigError):
        me.alpha_for_reflection(cfg, 0.0, 1.0)


def test_displaced_empty_network_is_coherent(cfg):
    empty = cfg.replace(g=0.0)
    alpha = me.alpha_for_reflection(cfg, 0.48, 0.0)
    tr = me.g2(me.build_system(empty, alpha), "R", "R", np.linspace(0, 20, 5))
    np.testing.assert_allclose(tr.values, 1.0, atol=1e-3)


# --- correlations -----------------------------------------------------------

def test_transmission_antibunching_and_decay(lab):
    tr = me.g2(lab, "T", "T", [0.0, 30.0])
    assert tr.values[0] < 1
    assert tr.values[1] == pytest.approx(1.0, abs=1e-4)


def test_cross_correlation_sign(lab):
    assert me.g2(lab, "P", "T", [0.0]).values[0] > 1


def test_g2_symmetry_and_swap(lab):
    tau = np.linspace(-3, 3, 7)
    tt = me.g2(lab, "T", "T", tau, check_truncation=False).values
    np.testing.assert_allclose(tt, tt[::-1], atol=1e-6)
    pt = me.g2(lab, "P", "T", tau, check_truncation=False).values
    tp = me.g2(lab, "T", "P", tau, check_truncation=False).values
    np.testing.assert_allclose(pt, tp[::-1], atol=1e-10)
    assert np.all(tt >= -1e-8) and np.all(pt >= -1e-8)


def test_dark_reflection_channel(cfg):
    empty = me.build_system(cfg.replace(g=0.0))
    with pytest.raises(DarkChannelError):
        me.g2(empty, "R", "R", [0.0])


def test_strong_drive_truncation(cfg):
    with pytest.raises(TruncationError):
        me.build_system(cfg.replace(drive_amplitude=cfg.drive_amplitude * 3e3))


def test_truncation_shift_small_at_default(lab):
    assert me.truncation_shift(lab, "T", "T") < 1e-3


def test_two_excitation_cap_option(cfg):
    small = me.build_system(cfg.replace(max_excitations=2))
    assert small.space.dim < 27
    v = me.g2(small, "T", "T", [0.0], check_truncation=False).values[0]
    assert 0 < v < 1


def test_projector_jump_switch(cfg):
    alt = me.build_system(cfg.replace(emitter_jump="dephasing"))
    ref = me.build_system(cfg)
    assert not np.allclose(alt.jumps[0].matrix, ref.jumps[0].matrix)
    assert alt.steady_state().is_valid()


def test_tau_grid_must_be_sorted(lab):
    with pytest.raises(ConfigError):
        me.g2(lab, "T", "T", [1.0, 0.0])
