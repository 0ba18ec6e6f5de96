"""Three-mode lossy-cavity model of an emitter in a waveguide.

The emitter (two-level) couples to a cavity mode ``c`` that is fed by an
input mode ``a_in`` and leaks into an output mode ``a_out``. Mode couplings
form a cascaded input-output network,

    H = H0 + H_drive + H_JC + H_3
    H0      = (w_e - w)|e><e| + (w_c - w)(c^dag c + a_in^dag a_in + a_out^dag a_out)
    H_drive = i zeta (a_in^dag - a_in)
    H_JC    = i g (c sigma_+ - c^dag sigma_-)
    H_3     = X + X^dag,
    X       = (i/2)(sqrt(k_in) v_in a_in^dag c + sqrt(k_in) v_out c^dag a_out
                    + m v_in v_out a_in^dag a_out)

with jumps sqrt(gamma) sigma_-, sqrt(k_in + k_out) c and
sqrt(k_in) c + v_in a_in + v_out a_out. The multiplier ``m`` on the cross
term is tuned so the empty cavity does not leak into ``a_out``; what remains
in ``a_out`` is light scattered by the emitter.

Units are arbitrary but consistent; the defaults use gamma = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from . import waveguide as wg
from .errors import (
    CalibrationError,
    ConfigError,
    DarkChannelError,
    LossyCavityWarning,
    TruncationError,
)
from .quantum import (
    BosonicMode,
    DensityState,
    HilbertSpace,
    Propagator,
    QOperator,
    TwoLevel,
    destroy,
    liouvillian,
    steady_state,
    vec,
)
from .traces import AUTO_PAIRS, CorrelationTrace, SpectrumTrace

MODE_NAMES = ("c", "a_in", "a_out")
CHANNELS = {"T": "transmission", "R": "reflection", "P": "psb"}
NORMALIZATION_DETUNING = 50.0  # in units of gamma
ADEQUACY_TOL = 1e-3


@dataclass(frozen=True)
class ThreeModeConfig:
    """Parameters of the three-mode model.

    Attributes
    ----------
    omega_e, omega_c, omega : float
        Emitter, cavity and probe frequencies; only the differences enter.
    g : float
        Emitter-cavity coupling.
    kappa_in, kappa_out : float
        Cavity decay rates.
    v_in, v_out : float
        Input/output mode couplings (square-root-of-rate units).
    drive_amplitude : float
        Coherent drive of ``a_in``.
    gamma : float
        Emitter decay outside the waveguide.
    fock_cutoff : int
        Fock levels kept per mode.
    max_excitations : int or None
        Global cap on total excitation number; ``None`` keeps the full
        product space.
    cross_coupling_scale : float
        Multiplier ``m`` on the ``a_in^dag a_out`` cross term.
    emitter_jump : {"decay", "dephasing"}
        ``sqrt(gamma)|g><e|`` or the projector form ``sqrt(gamma)|e><e|``.
    psb_operator : {"lowering", "projector"}
        Operator used as the sideband click inside correlations.
    """

    omega_e: float = 0.0
    omega_c: float = 0.0
    omega: float = 0.0
    g: float = 0.0
    kappa_in: float = 200.0
    kappa_out: float = 200.0
    v_in: float = 100.0
    v_out: float = 100.0
    drive_amplitude: float = 0.0
    gamma: float = 1.0
    fock_cutoff: int = 3
    max_excitations: int | None = 3
    cross_coupling_scale: float = 1.0
    emitter_jump: str = "decay"
    psb_operator: str = "lowering"

    def __post_init__(self):
        rates = ("g", "kappa_in", "kappa_out", "v_in", "v_out", "drive_amplitude", "gamma")
        for name in rates:
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 3:
            raise ConfigError("fock_cutoff must be an integer >= 3")
        if self.max_excitations is not None and self.max_excitations < 2:
            raise ConfigError("max_excitations must be >= 2 or None")
        if self.emitter_jump not in ("decay", "dephasing"):
            raise ConfigError("emitter_jump must be 'decay' or 'dephasing'")
        if self.psb_operator not in ("lowering", "projector"):
            raise ConfigError("psb_operator must be 'lowering' or 'projector'")
        floor = 10.0 * self.gamma
        if min(self.kappa_in + self.kappa_out, self.v_in, self.v_out) < floor:
            warnings.warn(
                "mode couplings are not >= 10 gamma; the cavity no longer acts as a broadband waveguide",
                LossyCavityWarning,
                stacklevel=3,
            )

    @property
    def emitter_detuning(self) -> float:
        return self.omega_e - self.omega

    @property
    def cavity_detuning(self) -> float:
        return self.omega_c - self.omega

    def with_probe_detuning(self, delta: float) -> "ThreeModeConfig":
        """Copy with the probe at ``omega_e + delta``."""
        return replace(self, omega=self.omega_e + delta)

    def replace(self, **changes) -> "ThreeModeConfig":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LossyCavityWarning)
            return replace(self, **changes)


# ---------------------------------------------------------------------------
# linear (mean-field) description of the empty mode network

def mode_matrix(config: ThreeModeConfig, cross_coupling_scale: float | None = None) -> np.ndarray:
    """Drift matrix A of the linear mode network, d<a>/dt = -A <a> + f.

    Mode order is (c, a_in, a_out); the emitter is left out.
    """
    m = config.cross_coupling_scale if cross_coupling_scale is None else cross_coupling_scale
    kin = config.kappa_in
    K = np.zeros((3, 3), dtype=complex)
    K[1, 0] = np.sqrt(kin) * config.v_in
    K[0, 2] = np.sqrt(kin) * config.v_out
    K[1, 2] = m * config.v_in * config.v_out
    X = 0.5j * K
    H = X + X.conj().T + config.cavity_detuning * np.eye(3)
    ell = np.array([np.sqrt(kin), config.v_in, config.v_out])
    G = np.outer(ell, ell)
    G[0, 0] += kin + config.kappa_out
    return 1j * H + G / 2


def mean_field_modes(config: ThreeModeConfig, cross_coupling_scale: float | None = None) -> np.ndarray:
    """Steady-state mode amplitudes (c, a_in, a_out) with the emitter removed."""
    A = mode_matrix(config, cross_coupling_scale)
    f = np.array([0.0, config.drive_amplitude, 0.0], dtype=complex)
    return np.linalg.solve(A, f)


def calibrate_cross_coupling(config: ThreeModeConfig, bracket=(1e-6, 1e3), rtol=1e-12) -> ThreeModeConfig:
    """Tune the cross-coupling multiplier so the empty cavity does not leak into ``a_out``.

    The empty network is linear, so its steady state is the mean-field
    solution and the root of Re<a_out>(m) is found with ``brentq``. On cavity
    resonance all amplitudes are real and the cancellation is exact. Off
    resonance a single real multiplier cannot null both quadratures; a
    ``RuntimeWarning`` reports the residual leakage.

    Raises
    ------
    CalibrationError
        If no sign change is found over the bracket.
    """
    if config.drive_amplitude <= 0:
        raise ConfigError("calibration needs drive_amplitude > 0")

    def leak(m):
        return mean_field_modes(config, m)[2].real / config.drive_amplitude

    grid = np.geomspace(bracket[0], bracket[1], 121)
    vals = np.array([leak(m) for m in grid])
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    if idx.size == 0:
        raise CalibrationError("no sign change of the leaked output field over the bracket")
    i = idx[0]
    m = brentq(leak, grid[i], grid[i + 1], xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps))
    amp = mean_field_modes(config, m)
    ratio = abs(amp[2]) ** 2 / abs(amp[1]) ** 2
    if ratio > 1e-10:
        warnings.warn(
            f"calibration leaves output/input flux ratio {ratio:.2e} (probe off cavity resonance)",
            RuntimeWarning,
            stacklevel=2,
        )
    return config.replace(cross_coupling_scale=float(m))


def effective_cavity_linewidth(config: ThreeModeConfig) -> float:
    """Linewidth kappa_eff the emitter sees through the mode network.

    Defined from the cavity response at zero detuning, (A^-1)_cc = 2 / kappa_eff,
    so that the emitter-cavity cooperativity is C = 4 g^2 / (kappa_eff gamma).
    """
    cfg = config.replace(omega_c=config.omega)
    G = np.linalg.inv(mode_matrix(cfg))
    return float(2.0 / G[0, 0].real)


def cooperativity_of(config: ThreeModeConfig) -> float:
    return 4 * config.g**2 / (effective_cavity_linewidth(config) * config.gamma)


def drive_for_saturation(config: ThreeModeConfig, saturation: float, g_reference: float | None = None) -> float:
    """Drive amplitude giving emitter saturation parameter ``saturation``.

    The saturation parameter is s = 2 Omega^2 / gamma_tot^2 with Rabi
    frequency Omega = 2 g |c| from the linear-response cavity field
    c = c_empty / (1 + C) and gamma_tot = gamma (1 + C). For a resonant weak
    probe s plays the role of <n>/n_c. If ``config.g`` is zero a reference
    coupling must be supplied.
    """
    g = config.g if g_reference is None else g_reference
    if g <= 0:
        raise ConfigError("drive_for_saturation needs a nonzero coupling (or g_reference)")
    if saturation <= 0:
        raise ConfigError("saturation must be positive")
    kappa_eff = effective_cavity_linewidth(config)
    C = 4 * g**2 / (kappa_eff * config.gamma)
    cfg = config.replace(omega_c=config.omega, drive_amplitude=1.0)
    c_unit = mean_field_modes(cfg)[0] / (1 + C)
    rabi = 2 * g * abs(c_unit)
    s_unit = 2 * rabi**2 / (config.gamma * (1 + C)) ** 2
    return float(np.sqrt(saturation / s_unit))


def default_config(beta: float, saturation: float = 1e-3, **overrides) -> ThreeModeConfig:
    """Calibrated configuration whose cooperativity matches ``beta``.

    Starts from gamma = 1, kappa_in = kappa_out = 200, v_in = v_out =
    sqrt(50 kappa_in), calibrates the cross coupling, sets
    g = sqrt(C kappa_eff gamma / 4) with C = beta / (1 - beta) and picks the
    drive for the requested saturation parameter. For ``beta = 0`` the drive
    is chosen as for beta = 0.143.
    """
    base = ThreeModeConfig(**{"drive_amplitude": 1.0, **overrides})
    base = calibrate_cross_coupling(base)
    kappa_eff = effective_cavity_linewidth(base)
    g = wg.cavity_g_from_cooperativity(wg.cooperativity(beta), kappa_eff, base.gamma)
    cfg = base.replace(g=g)
    g_ref = None
    if g == 0:
        g_ref = wg.cavity_g_from_cooperativity(wg.cooperativity(0.143), kappa_eff, base.gamma)
    return cfg.replace(drive_amplitude=drive_for_saturation(cfg, saturation, g_ref))


# ---------------------------------------------------------------------------
# operator-level model

def _full_operators(cutoff: int) -> dict:
    two = np.eye(2)
    one = np.eye(cutoff)
    a = destroy(cutoff)
    sm = np.array([[0, 1], [0, 0]], dtype=complex)

    def kron(*ops):
        out = ops[0]
        for o in ops[1:]:
            out = np.kron(out, o)
        return out

    return {
        "sigma_minus": kron(sm, one, one, one),
        "c": kron(two, a, one, one),
        "a_in": kron(two, one, a, one),
        "a_out": kron(two, one, one, a),
    }


def _hamiltonian_terms(config: ThreeModeConfig, ops: dict) -> dict:
    """Full-space Hamiltonian pieces built from (possibly displaced) operators."""
    c, ai, ao, sm = ops["c"], ops["a_in"], ops["a_out"], ops["sigma_minus"]
    dag = lambda x: x.conj().T  # noqa: E731
    ee = dag(sm) @ sm
    kin, vin, vout = config.kappa_in, config.v_in, config.v_out
    H0 = config.emitter_detuning * ee + config.cavity_detuning * (
        dag(c) @ c + dag(ai) @ ai + dag(ao) @ ao
    )
    Hd = 1j * config.drive_amplitude * (dag(ai) - ai)
    Hjc = 1j * config.g * (c @ dag(sm) - dag(c) @ sm)
    X = 0.5j * (
        np.sqrt(kin) * vin * dag(ai) @ c
        + np.sqrt(kin) * vout * dag(c) @ ao
        + config.cross_coupling_scale * vin * vout * dag(ai) @ ao
    )
    return {"H0": H0, "H_drive": Hd, "H_JC": Hjc, "H_three_mode": X + dag(X)}


def _jump_list(config: ThreeModeConfig, ops: dict) -> list:
    sm = ops["sigma_minus"]
    emitter = sm if config.emitter_jump == "decay" else sm.conj().T @ sm
    return [
        np.sqrt(config.gamma) * emitter,
        np.sqrt(config.kappa_in + config.kappa_out) * ops["c"],
        np.sqrt(config.kappa_in) * ops["c"] + config.v_in * ops["a_in"] + config.v_out * ops["a_out"],
    ]


@dataclass(frozen=True, eq=False)
class LindbladSystem:
    """Hamiltonian, jumps and detection channels on the (possibly capped) space.

    Attributes
    ----------
    terms : dict of QOperator
        ``H0``, ``H_drive``, ``H_JC`` and ``H_three_mode`` individually.
    jumps : list of QOperator
        Emitter, cavity and three-mode jump operators, in that order.
    channels : dict of QOperator
        ``T`` (sqrt(kappa_out) c), ``R`` (reflection) and ``P`` (sideband).
    operators : dict of QOperator
        Bare ``c``, ``a_in``, ``a_out``, ``sigma_minus`` and ``excited``.
    alpha : complex
        Displacement applied to ``a_out`` (0 in the lab frame).
    """

    config: ThreeModeConfig
    space: HilbertSpace
    terms: dict
    hamiltonian: QOperator
    jumps: list
    channels: dict
    operators: dict
    alpha: complex = 0.0
    frame: str = "lab"
    _cache: dict = field(default_factory=dict, repr=False)

    @cached_property
    def liouvillian(self):
        return liouvillian(self.hamiltonian, self.jumps)

    def steady_state(self) -> DensityState:
        if "rho" not in self._cache:
            self._cache["rho"] = steady_state(self.liouvillian)
        return self._cache["rho"]

    def propagator(self) -> Propagator:
        if "prop" not in self._cache:
            self._cache["prop"] = Propagator(self.liouvillian)
        return self._cache["prop"]

    def expect(self, op, rho: DensityState | None = None) -> complex:
        rho = self.steady_state() if rho is None else rho
        op = self.channels.get(op, self.operators.get(op)) if isinstance(op, str) else op
        return op.expect(rho)

    def flux(self, channel: str, rho: DensityState | None = None) -> float:
        """<O^dag O> for a detection channel."""
        O = self.channels[channel]
        return float((O.dag() @ O).expect(self.steady_state() if rho is None else rho).real)


def _estimate_truncation(config: ThreeModeConfig):
    occ = np.abs(mean_field_modes(config)) ** 2
    if occ.max() >= config.fock_cutoff - 1:
        raise TruncationError(
            f"mean mode occupation {occ.max():.3g} too large for fock_cutoff {config.fock_cutoff}"
        )


def build_system(
    config: ThreeModeConfig,
    alpha: complex = 0.0,
    displacement: str = "exact",
    reflection_form: str = "standard",
) -> LindbladSystem:
    """Assemble the Lindblad model.

    Parameters
    ----------
    config : ThreeModeConfig
    alpha : complex
        Displacement of the output mode (see :func:`displaced_frame`).
    displacement : {"exact", "matrix"}
        ``"exact"`` substitutes ``a_out -> a_out - alpha`` in every operator,
        which is the displacement identity applied before truncation.
        ``"matrix"`` conjugates with the truncated matrix exponential.
    reflection_form : {"standard", "printed"}
        Reflection channel ``D a_out D^dag`` (standard) or ``D a_out D``.

    Raises
    ------
    TruncationError
        If the linear-response mode occupation reaches ``fock_cutoff - 1``.
    """
    _estimate_truncation(config)
    if displacement not in ("exact", "matrix"):
        raise ConfigError("displacement must be 'exact' or 'matrix'")
    if reflection_form not in ("standard", "printed"):
        raise ConfigError("reflection_form must be 'standard' or 'printed'")
    n = config.fock_cutoff
    space = HilbertSpace(
        (TwoLevel(), BosonicMode(n), BosonicMode(n), BosonicMode(n)), config.max_excitations
    )
    bare = _full_operators(n)
    eye = np.eye(space.full_dim)
    D = None
    if alpha != 0:
        a = destroy(n)
        from scipy.linalg import expm

        D = space.embed_full(expm(alpha * a.conj().T - np.conj(alpha) * a), 3)
    if alpha != 0 and displacement == "exact":
        ops = dict(bare, a_out=bare["a_out"] - alpha * eye)
        terms = _hamiltonian_terms(config, ops)
        jumps = _jump_list(config, ops)
    else:
        terms = _hamiltonian_terms(config, bare)
        jumps = _jump_list(config, bare)
        if D is not None:
            conj = lambda X: D @ X @ D.conj().T  # noqa: E731
            terms = {k: conj(v) for k, v in terms.items()}
            jumps = [conj(L) for L in jumps]

    ao = bare["a_out"]
    if D is not None and reflection_form == "printed":
        # in the displaced frame the standard channel is a_out itself;
        # the printed form conjugates once more without the adjoint
        refl = D @ ao @ D
    else:
        refl = ao
    sm = bare["sigma_minus"]
    psb = sm if config.psb_operator == "lowering" else sm.conj().T @ sm

    R = lambda X: QOperator(space, space.restrict(X))  # noqa: E731
    q_terms = {k: R(v) for k, v in terms.items()}
    H = QOperator(space, sum(t.matrix for t in q_terms.values()))
    return LindbladSystem(
        config=config,
        space=space,
        terms=q_terms,
        hamiltonian=H,
        jumps=[R(L) for L in jumps],
        channels={
            "T": R(np.sqrt(config.kappa_out) * bare["c"]),
            "R": R(refl),
            "P": R(psb),
        },
        operators={
            "c": R(bare["c"]),
            "a_in": R(bare["a_in"]),
            "a_out": R(ao),
            "sigma_minus": R(sm),
            "excited": R(sm.conj().T @ sm),
        },
        alpha=complex(alpha),
        frame="lab" if alpha == 0 else "displaced",
    )


def displaced_frame(system: LindbladSystem, alpha: complex, **kwargs) -> LindbladSystem:
    """Move the system into the frame displaced by ``alpha`` on ``a_out``.

    In the displaced frame the reflection channel measures the output field
    plus a coherent amplitude ``alpha``, i.e. the emitter-scattered light
    interfering with a classical reflection. Displacements compose
    additively, so ``displaced_frame(displaced_frame(s, a), -a)`` is ``s``.
    """
    if abs(alpha) ** 2 >= system.config.fock_cutoff / 4:
        from .errors import TruncationWarning

        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} is not small against the output-mode cutoff",
            TruncationWarning,
            stacklevel=2,
        )
    return build_system(system.config, system.alpha + alpha, **kwargs)


def scattered_output_amplitude(config: ThreeModeConfig) -> complex:
    """Lab-frame <a_out> on emitter resonance: the emitter-scattered field."""
    cfg = config.with_probe_detuning(0.0)
    return complex(build_system(cfg).expect("a_out"))


def alpha_for_reflection(config: ThreeModeConfig, xi: float, phi: float) -> complex:
    """Displacement reproducing the interference parameters (xi, phi).

    With scattered field s, alpha = s exp(-i phi) / xi so that s / alpha =
    xi exp(i phi); the displaced reflection then follows
    |1 + xi exp(i phi)|^2 relative to |alpha|^2 on resonance.
    """
    if xi <= 0:
        raise ConfigError("xi must be positive to define a displacement")
    s = scattered_output_amplitude(config)
    if s == 0:
        raise DarkChannelError("no scattered output field to reference the phase to")
    return s * np.exp(-1j * phi) / xi


# ---------------------------------------------------------------------------
# spectra

def spectrum_sweep(
    config: ThreeModeConfig,
    detuning_grid,
    channel: str = "transmission",
    alpha: complex = 0.0,
    normalization_detuning: float | None = None,
    baseline: str | None = None,
) -> SpectrumTrace:
    """Steady-state channel intensity versus probe detuning from the emitter.

    Parameters
    ----------
    baseline : {"empty", "far"}, optional
        ``"empty"`` divides each point by the same channel of the
        emitter-free network (g = 0) at the same detuning; ``"far"`` divides
        by the value at a far detuning (50 gamma unless
        ``normalization_detuning`` is given). Transmission defaults to
        ``"empty"``, since the calibrated network itself transmits slightly
        less away from cavity resonance; reflection defaults to ``"far"``.
        The sideband channel is always divided by its on-resonance value.
    """
    key = {"transmission": "T", "reflection": "R", "psb": "P", "T": "T", "R": "R", "P": "P"}.get(channel)
    if key is None:
        raise ConfigError(f"unknown channel {channel!r}")
    grid = np.asarray(detuning_grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ConfigError("detuning grid must be finite")

    if baseline is None:
        baseline = "empty" if key == "T" else "far"
    if baseline not in ("empty", "far"):
        raise ConfigError("baseline must be 'empty' or 'far'")

    def intensity(delta, cfg=config):
        sys_ = build_system(cfg.with_probe_detuning(delta), alpha)
        if key == "P":
            return float(sys_.expect("excited").real)
        return sys_.flux(key)

    values = np.array([intensity(d) for d in grid])
    if key == "P":
        ref = intensity(0.0)
    elif baseline == "empty":
        empty = config.replace(g=0.0)
        ref = np.array([intensity(d, empty) for d in grid])
    else:
        far = NORMALIZATION_DETUNING * config.gamma if normalization_detuning is None else normalization_detuning
        ref = intensity(far)
    if np.any(np.asarray(ref) <= 0):
        raise DarkChannelError(f"{CHANNELS[key]} reference intensity vanishes")
    return SpectrumTrace(grid, values / ref, channel=CHANNELS[key], x_unit="rad/s")


# ---------------------------------------------------------------------------
# correlations

def _trace_with(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Tr(M X) for column-stacked X (or a stack of them along the last axis)."""
    return v @ vec(M.T) if v.ndim == 2 else vec(M.T) @ v


def _channel(system: LindbladSystem, key: str) -> QOperator:
    if key not in system.channels:
        raise ConfigError(f"unknown channel {key!r}; expected one of {sorted(system.channels)}")
    return system.channels[key]


def _zero_delay(system: LindbladSystem, k1: str, k2: str, rho: DensityState) -> float:
    O1, O2 = _channel(system, k1).matrix, _channel(system, k2).matrix
    r = rho.matrix
    X = O1 @ r @ O1.conj().T
    n1 = np.trace(X).real
    n2 = np.trace(O2 @ r @ O2.conj().T).real
    return float(np.trace(O2.conj().T @ O2 @ X).real / (n1 * n2))


def _rebuilt(system: LindbladSystem, cutoff: int, cap) -> LindbladSystem:
    cfg = system.config.replace(fock_cutoff=cutoff, max_excitations=cap)
    return build_system(cfg, system.alpha)


def truncation_shift(system: LindbladSystem, k1: str, k2: str) -> float:
    """Change of g2(0) when one more Fock level (and excitation) is kept."""
    cfg = system.config
    cap = None if cfg.max_excitations is None else cfg.max_excitations + 1
    bigger = _rebuilt(system, cfg.fock_cutoff + 1, cap)
    a = _zero_delay(system, k1, k2, system.steady_state())
    b = _zero_delay(bigger, k1, k2, bigger.steady_state())
    return abs(a - b)


def g2(system: LindbladSystem, O1: str, O2: str, tau_grid, check_truncation: bool = True,
       dark_threshold: float = 1e-14) -> CorrelationTrace:
    """Normalised two-time intensity correlation between two channels.

    g2(tau) = Tr[O2^dag O2 e^{tau L}(O1 rho O1^dag)] / (<O1^dag O1><O2^dag O2>)

    for tau >= 0; negative delays use g2_{O1 O2}(-tau) = g2_{O2 O1}(tau).

    Parameters
    ----------
    system : LindbladSystem
    O1, O2 : {"T", "R", "P"}
        Start and stop channels.
    tau_grid : array_like
        Sorted delays (same time unit as 1/gamma).
    check_truncation : bool
        Re-solve the steady state with one more Fock level and excitation
        and require g2(0) to move by less than 1e-3.

    Raises
    ------
    DarkChannelError
        If either channel carries no flux (relative to the input mode).
    TruncationError
        If the truncation check fails.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size == 0:
        raise ConfigError("tau_grid must be a non-empty 1-D array")
    if np.any(np.diff(tau) < 0):
        raise ConfigError("tau_grid must be sorted")
    rho = system.steady_state()
    r = rho.matrix
    A, B = _channel(system, O1).matrix, _channel(system, O2).matrix
    XA = A @ r @ A.conj().T
    XB = B @ r @ B.conj().T
    nA, nB = np.trace(XA).real, np.trace(XB).real
    scale = max(system.flux("T"), (system.operators["a_in"].dag() @ system.operators["a_in"]).expect(rho).real)
    for name, n in ((O1, nA), (O2, nB)):
        if n <= dark_threshold * scale:
            raise DarkChannelError(f"channel {name} carries no flux ({n:.2e})")
    norm = nA * nB

    prop = system.propagator()
    values = np.empty(tau.size)
    pos = tau >= 0
    groups = [(pos, XA, B), (~pos, XB, A)]
    for mask, X, O in groups:
        if not np.any(mask):
            continue
        t = np.abs(tau[mask])
        order = np.argsort(t, kind="stable")
        traj = prop.trajectory(vec(X), t[order])
        out = np.empty(t.size)
        out[order] = _trace_with(O.conj().T @ O, traj).real
        values[mask] = out / norm

    if check_truncation:
        shift = truncation_shift(system, O1, O2)
        if shift >= ADEQUACY_TOL:
            raise TruncationError(f"g2(0) changes by {shift:.2e} with a larger truncation")

    pair = O1 + O2
    return CorrelationTrace(tau, values, channel_pair=pair, normalization=float(norm))
