import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import random_density
from wgqed.errors import NondegeneracyError, SpaceMismatchError, TruncationWarning
from wgqed.quantum import (
    BosonicMode,
    DensityState,
    HilbertSpace,
    Propagator,
    QOperator,
    TwoLevel,
    displacement_operator,
    excited_projector,
    ladder_operators,
    liouvillian,
    propagate,
    sigma_minus,
    steady_state,
    unvec,
    vec,
)


def qubit():
    return HilbertSpace((TwoLevel(),))


def mode(n):
    return HilbertSpace((BosonicMode(n),))


# --- spaces and ladder operators -------------------------------------------

def test_space_dimensions():
    sp = HilbertSpace((TwoLevel(), BosonicMode(3), BosonicMode(4)))
    assert sp.dim == 24 and sp.dims == (2, 3, 4)


def test_bosonic_mode_needs_two_levels():
    with pytest.raises(ValueError):
        BosonicMode(1)


def test_excitation_cap_keeps_low_states():
    sp = HilbertSpace((TwoLevel(), BosonicMode(3), BosonicMode(3), BosonicMode(3)), max_excitations=3)
    assert sp.full_dim == 54 and sp.dim == 27
    assert sp.excitation_numbers.max() == 3


def test_ladder_cutoff_two():
    a, ad = ladder_operators(mode(2), 0)
    np.testing.assert_array_equal(a.matrix, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(ad.matrix, a.matrix.conj().T)


def test_ladder_matrix_element():
    a, _ = ladder_operators(mode(3), 0)
    assert a.matrix[1, 2] == pytest.approx(np.sqrt(2))


def test_ladder_embedding_by_hand():
    sp = HilbertSpace((TwoLevel(), BosonicMode(3)))
    a, _ = ladder_operators(sp, 1)
    # identity (2x2) kron ladder (3x3), written out
    s2 = np.sqrt(2)
    expected = np.array([
        [0, 1, 0, 0, 0, 0],
        [0, 0, s2, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, s2],
        [0, 0, 0, 0, 0, 0],
    ])
    np.testing.assert_allclose(a.matrix, expected, atol=0)


def test_ladder_errors():
    sp = HilbertSpace((TwoLevel(), BosonicMode(3)))
    with pytest.raises(TypeError):
        ladder_operators(sp, 0)
    with pytest.raises(IndexError):
        ladder_operators(sp, 2)


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_commutator_block_structure(n):
    a, ad = ladder_operators(mode(n), 0)
    comm = (a @ ad - ad @ a).matrix
    expected = np.eye(n)
    expected[-1, -1] = -(n - 1)
    np.testing.assert_allclose(comm, expected, atol=1e-12)


def test_operator_space_mismatch():
    a, _ = ladder_operators(mode(3), 0)
    b, _ = ladder_operators(mode(4), 0)
    with pytest.raises(SpaceMismatchError):
        a + b
    with pytest.raises(SpaceMismatchError):
        QOperator(mode(3), np.eye(4))


# --- displacement ------------------------------------------------------------

def test_displacement_zero_is_identity():
    D = displacement_operator(mode(10), 0, 0.0)
    np.testing.assert_allclose(D.matrix, np.eye(10), atol=1e-15)


def test_displaced_vacuum_mean_field():
    sp = mode(10)
    alpha = 0.3
    D = displacement_operator(sp, 0, alpha)
    a, _ = ladder_operators(sp, 0)
    ket = D.matrix[:, 0]
    assert abs(ket.conj() @ a.matrix @ ket - alpha) < 1e-6


@given(st.floats(0, 0.5), st.floats(0, 2 * np.pi), st.integers(10, 14))
def test_displacement_unitary_and_inverse(r, th, n):
    sp = mode(n)
    alpha = r * np.exp(1j * th)
    D = displacement_operator(sp, 0, alpha).matrix
    Dm = displacement_operator(sp, 0, -alpha).matrix
    assert np.max(np.abs(D.conj().T @ D - np.eye(n))) <= 1e-8
    assert np.max(np.abs(D @ Dm - np.eye(n))) <= 1e-8


def test_displacement_warns_for_large_alpha():
    with pytest.warns(TruncationWarning):
        displacement_operator(mode(4), 0, 1.0)


# --- Liouvillian -------------------------------------------------------------

def test_amplitude_damping_decay():
    sp = qubit()
    gamma = 0.7
    L = liouvillian(QOperator(sp, np.zeros((2, 2))), [np.sqrt(gamma) * sigma_minus(sp, 0)])
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    for t in (0.3, 1.0, 2.5):
        rho = unvec(propagate(L, rho0, t), 2)
        assert rho[1, 1].real == pytest.approx(np.exp(-gamma * t), abs=1e-10)


def test_dephasing_coherence_rate():
    # optical Bloch: coherence decays at gamma/2 + gamma_deph with L = sqrt(2 gamma_deph) |e><e|
    sp = qubit()
    gamma, gdeph = 1.0, 0.4
    jumps = [np.sqrt(gamma) * sigma_minus(sp, 0), np.sqrt(2 * gdeph) * excited_projector(sp, 0)]
    L = liouvillian(QOperator(sp, np.zeros((2, 2))), jumps)
    rho0 = np.full((2, 2), 0.5, dtype=complex)
    t = 1.3
    rho = unvec(propagate(L, rho0, t), 2)
    assert abs(rho[0, 1]) == pytest.approx(0.5 * np.exp(-(gamma / 2 + gdeph) * t), rel=1e-10)


def test_hamiltonian_only_trace_zero(rng):
    sp = qubit()
    H = QOperator(sp, 0.8 * np.diag([-0.5, 0.5]))
    L = liouvillian(H)
    rho = random_density(rng, 2)
    out = unvec(L.apply(rho), 2)
    assert abs(np.trace(out)) < 1e-12


def test_liouvillian_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        liouvillian(QOperator(qubit(), np.eye(2)), [QOperator(mode(3), np.eye(3))])


def _random_system(rng, d, n_jumps=2):
    sp = mode(d)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = QOperator(sp, (A + A.conj().T) / 2)
    jumps = [QOperator(sp, rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) for _ in range(n_jumps)]
    return liouvillian(H, jumps)


def test_trace_preservation_random_inputs(rng):
    for d in (2, 3, 5):
        L = _random_system(rng, d)
        for _ in range(100 // 3 + 1):
            rho = random_density(rng, d)
            out = unvec(L.apply(rho), d)
            assert abs(np.trace(out)) <= 1e-9


@given(st.integers(2, 8), st.floats(0.0, 1.5), st.floats(0.0, 1.5), st.integers(0, 2**31))
def test_semigroup_property(d, t1, t2, seed):
    rng = np.random.default_rng(seed)
    L = _random_system(rng, d)
    v = vec(random_density(rng, d))
    a = propagate(L, propagate(L, v, t1), t2)
    b = propagate(L, v, t1 + t2)
    assert np.max(np.abs(a - b)) <= 1e-7


def test_propagate_zero_and_trace(rng):
    L = _random_system(rng, 4)
    v = vec(random_density(rng, 4))
    np.testing.assert_array_equal(propagate(L, v, 0.0), v)
    out = unvec(propagate(L, v, 0.8), 4)
    assert abs(np.trace(out) - 1) <= 1e-8


def test_propagate_matches_dense_expm(rng):
    L = _random_system(rng, 3)
    v = vec(random_density(rng, 3))
    ref = expm(L.toarray() * 0.6) @ v
    np.testing.assert_allclose(propagate(L, v, 0.6), ref, atol=1e-12)


def test_propagator_trajectory_uniform_grid(rng):
    L = _random_system(rng, 3)
    v = vec(random_density(rng, 3))
    taus = np.linspace(0, 2, 9)
    traj = Propagator(L).trajectory(v, taus)
    for t, row in zip(taus, traj):
        np.testing.assert_allclose(row, propagate(L, v, t), atol=1e-10)


def test_propagate_rejects_negative_time(rng):
    L = _random_system(rng, 2)
    with pytest.raises(ValueError):
        propagate(L, np.eye(2) / 2, -1.0)


# --- steady state ------------------------------------------------------------

@pytest.mark.parametrize("rabi", [0.1, 0.5, 2.0])
def test_driven_two_level_steady_state(rabi):
    sp = qubit()
    gamma = 1.0
    sm = sigma_minus(sp, 0)
    H = 0.5 * rabi * (sm + sm.dag())
    rho = steady_state(liouvillian(H, [np.sqrt(gamma) * sm]))
    expected = rabi**2 / (gamma**2 + 2 * rabi**2)
    assert rho.matrix[1, 1].real == pytest.approx(expected, abs=1e-12)
    assert rho.is_valid()


def test_damped_mode_relaxes_to_vacuum():
    sp = mode(5)
    a, _ = ladder_operators(sp, 0)
    H = QOperator(sp, np.zeros((5, 5)))
    rho = steady_state(liouvillian(H, [a]))
    expected = np.zeros((5, 5))
    expected[0, 0] = 1
    np.testing.assert_allclose(rho.matrix, expected, atol=1e-12)


def test_degenerate_null_space_raises():
    # no dissipation: every diagonal state is stationary
    sp = qubit()
    H = QOperator(sp, np.diag([0.0, 1.0]))
    with pytest.raises(NondegeneracyError):
        steady_state(liouvillian(H))


@given(st.integers(2, 6), st.integers(0, 2**31))
def test_steady_state_invariants_random(d, seed):
    rng = np.random.default_rng(seed)
    L = _random_system(rng, d)
    rho = steady_state(L)
    assert rho.is_valid()
    assert np.max(np.abs(L.apply(rho))) <= 1e-9 * max(1, np.abs(L.matrix).max())


def test_density_state_violations():
    sp = qubit()
    bad = DensityState(sp, np.diag([1.2, -0.2]))
    assert any("negative" in v for v in bad.violations())
    assert DensityState.from_ket(sp, [1, 1]).is_valid()
