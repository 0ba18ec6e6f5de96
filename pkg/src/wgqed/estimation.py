"""Nonlinear least-squares fits and derived-parameter extraction.

Every fit returns a :class:`FitResult`. Fits do not know about units: the
parameters come out in the units of the trace axes (a Lorentzian fitted to a
MHz axis has a MHz width). Optimisation uses ``scipy.optimize.least_squares``
(trust-region reflective with bounds) and analytic Jacobians.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from . import waveguide as wg
from .errors import ModeFitError, NoPeakError, NoSignalError
from .traces import CorrelationTrace, SpectrumTrace

XTOL = 1e-10
FTOL = 1e-12
MAX_NFEV = 500


@dataclass
class FitResult:
    """Point estimates with one-sigma uncertainties and diagnostics.

    ``flags`` holds boolean diagnostics (for example ``flat_reflection``);
    ``extra`` holds derived numbers that are not fit parameters.
    """

    names: tuple
    values: np.ndarray
    covariance: np.ndarray
    residuals: np.ndarray
    chi2_reduced: float
    converged: bool
    iterations: int
    flags: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def uncertainties(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    def sigma(self, name: str) -> float:
        return float(self.uncertainties[self.names.index(name)])

    def params(self) -> dict:
        return {n: {"value": float(v), "sigma": float(s)}
                for n, v, s in zip(self.names, self.values, self.uncertainties)}

    @property
    def reliable(self) -> bool:
        return self.converged


def _covariance(jac_w: np.ndarray, chi2_red: float, scaled: bool) -> np.ndarray:
    cov = np.linalg.pinv(jac_w.T @ jac_w, rcond=1e-15, hermitian=True)
    cov = (cov + cov.T) / 2
    if scaled:
        cov = cov * chi2_red
    return cov


def _run_fit(names, model, jac, starts, x, y, sigma, bounds, scales=None):
    """Weighted least squares from several starts; keep the lowest cost.

    ``scales`` rescales parameters internally (p = scales * q) so that the
    optimiser works with numbers of order one.
    """
    w = np.ones_like(y) if sigma is None else 1.0 / np.asarray(sigma, float)
    scales = np.ones(len(names)) if scales is None else np.asarray(scales, float)
    lo = np.asarray(bounds[0], float) / scales
    hi = np.asarray(bounds[1], float) / scales

    def res(q):
        return (model(x, *(q * scales)) - y) * w

    def jq(q):
        return jac(x, *(q * scales)) * scales[None, :] * w[:, None]

    best = None
    for p0 in starts:
        q0 = np.clip(np.asarray(p0, float) / scales, lo, hi)
        nudge_lo = np.isfinite(lo) & (q0 <= lo)
        nudge_hi = np.isfinite(hi) & (q0 >= hi)
        q0[nudge_lo] = lo[nudge_lo] + 1e-9 * np.maximum(1, np.abs(lo[nudge_lo]))
        q0[nudge_hi] = hi[nudge_hi] - 1e-9 * np.maximum(1, np.abs(hi[nudge_hi]))
        try:
            sol = optimize.least_squares(
                res, q0, jac=jq, bounds=(lo, hi), method="trf",
                xtol=XTOL, ftol=FTOL, gtol=1e-15, max_nfev=MAX_NFEV, x_scale="jac",
            )
        except ValueError:
            continue
        if best is None or sol.cost < best.cost:
            best = sol
    if best is None:
        raise NoSignalError("fit could not be started from any initial guess")
    p = best.x * scales
    r = res(best.x)
    dof = max(1, y.size - len(names))
    chi2 = float(r @ r / dof)
    J = jac(x, *p) * w[:, None]
    cov = _covariance(J, chi2, sigma is None)
    return FitResult(
        names=tuple(names),
        values=p,
        covariance=cov,
        residuals=model(x, *p) - y,
        chi2_reduced=chi2,
        converged=bool(best.status > 0),
        iterations=int(best.nfev),
    )


# ---------------------------------------------------------------------------
# Lorentzian line

def lorentzian(x, center, fwhm, height, offset):
    return offset + height / (1.0 + (2.0 * (x - center) / fwhm) ** 2)


def _lorentzian_jac(x, center, fwhm, height, offset):
    u = 2.0 * (x - center) / fwhm
    den = 1.0 + u**2
    d_u = -2.0 * height * u / den**2
    return np.column_stack([d_u * (-2.0 / fwhm), d_u * (-u / fwhm), 1.0 / den, np.ones_like(x)])


def _voigt(x, center, fwhm_l, fwhm_g, height, offset):
    sig = fwhm_g / (2 * np.sqrt(2 * np.log(2)))
    gam = fwhm_l / 2
    prof = special.voigt_profile(x - center, sig, gam) / special.voigt_profile(0.0, sig, gam)
    return offset + height * prof


def voigt_fwhm(fwhm_l, fwhm_g):
    """Olivero-Longbothum approximation (accurate to ~2e-4)."""
    return 0.5346 * fwhm_l + np.sqrt(0.2166 * fwhm_l**2 + fwhm_g**2)


def _peak_guess(x, y):
    order = np.argsort(x)
    x, y = x[order], y[order]
    n_edge = max(1, x.size // 10)
    offset = float(np.median(np.r_[y[:n_edge], y[-n_edge:]]))
    dev = y - offset
    i = int(np.argmax(np.abs(dev)))
    height = float(dev[i])
    half = np.abs(dev) >= abs(height) / 2
    # contiguous half-max region around the extremum
    lo = i
    while lo > 0 and half[lo - 1]:
        lo -= 1
    hi = i
    while hi < x.size - 1 and half[hi + 1]:
        hi += 1
    fwhm = float(x[hi] - x[lo]) if hi > lo else float(np.min(np.diff(x)))
    return float(x[i]), max(fwhm, float(np.min(np.diff(x)))), height, offset


def fit_lorentzian(trace: SpectrumTrace, profile: str = "lorentzian") -> FitResult:
    """Fit ``offset + height / (1 + (2 (x - center) / fwhm)^2)``.

    Parameters
    ----------
    trace : SpectrumTrace
        At least 8 points. Peaks and dips are both accepted (``height`` is
        signed).
    profile : {"lorentzian", "voigt"}
        ``"voigt"`` fits a Voigt line and reports the total ``fwhm`` with
        its Lorentzian and Gaussian parts in ``extra``.

    Raises
    ------
    NoPeakError
        For flat data.
    """
    x, y = trace.x, trace.values
    if x.size < 8:
        raise ValueError("a line fit needs at least 8 points")
    if np.ptp(y) <= 1e-12 * max(1.0, np.max(np.abs(y))):
        raise NoPeakError("trace is flat")
    c0, w0, h0, o0 = _peak_guess(x, y)
    span = np.ptp(x)
    if span < 1.5 * w0:
        raise ValueError("grid must span at least 1.5 times the line width")
    if profile == "lorentzian":
        starts = [(c0, w0, h0, o0), (c0, 0.5 * w0, h0, o0), (c0, 2 * w0, h0, o0)]
        bounds = ([x.min() - span, 1e-9 * span, -np.inf, -np.inf], [x.max() + span, 10 * span, np.inf, np.inf])
        res = _run_fit(("center", "fwhm", "height", "offset"), lorentzian, _lorentzian_jac,
                       starts, x, y, trace.sigma, bounds, scales=[span, span, abs(h0), abs(h0)])
        return res
    if profile == "voigt":
        names = ("center", "fwhm_lorentz", "fwhm_gauss", "height", "offset")

        def jac(xx, *p):
            p = np.asarray(p, float)
            steps = 1e-7 * np.maximum(np.abs(p), np.array([span, span, span, abs(h0), abs(h0)]) * 1e-3)
            cols = []
            for k in range(p.size):
                dp = np.zeros_like(p)
                dp[k] = steps[k]
                cols.append((_voigt(xx, *(p + dp)) - _voigt(xx, *(p - dp))) / (2 * steps[k]))
            return np.column_stack(cols)

        starts = [(c0, 0.7 * w0, 0.5 * w0, h0, o0), (c0, 0.3 * w0, 0.8 * w0, h0, o0)]
        bounds = ([x.min() - span, 1e-9 * span, 1e-9 * span, -np.inf, -np.inf],
                  [x.max() + span, 10 * span, 10 * span, np.inf, np.inf])
        res = _run_fit(names, _voigt, jac, starts, x, y, trace.sigma, bounds,
                       scales=[span, span, span, abs(h0), abs(h0)])
        res.extra["fwhm"] = float(voigt_fwhm(res["fwhm_lorentz"], res["fwhm_gauss"]))
        return res
    raise ValueError("profile must be 'lorentzian' or 'voigt'")


# ---------------------------------------------------------------------------
# saturation

def _saturation_model(P, beta, P_c):
    return wg.saturation_contrast(P, beta, P_c)


def _saturation_jac(P, beta, P_c):
    x = P / P_c
    a = beta / (1 + x)
    d_a = 2 - 2 * a
    return np.column_stack([d_a / (1 + x), d_a * beta * x / (P_c * (1 + x) ** 2)])


def fit_saturation(powers, contrasts, sigmas=None) -> FitResult:
    """Fit on-resonance contrast versus probe power.

    The model is 1 - T(0) with <n>/n_c = P/P_c, i.e.
    a(2 - a) with a = beta / (1 + P/P_c). Powers can be in any unit; P_c is
    returned in the same unit.

    Raises
    ------
    NoSignalError
        If every contrast is <= 0.
    """
    P = np.asarray(powers, float)
    y = np.asarray(contrasts, float)
    if P.size < 5 or y.size != P.size:
        raise ValueError("need at least 5 matching power/contrast points")
    if np.any(P <= 0):
        raise ValueError("powers must be positive")
    if np.max(P) / np.min(P) < 10:
        raise ValueError("powers must span at least one decade")
    if np.all(y <= 0):
        raise NoSignalError("no positive contrast in the data")
    order = np.argsort(P)
    P, y = P[order], y[order]
    s = None if sigmas is None else np.asarray(sigmas, float)[order]

    low = float(np.clip(np.mean(y[:2]), 1e-6, 1 - 1e-9))
    b0 = float(np.clip(wg.beta_from_contrast(low), 1e-4, 0.999))
    # contrast falls to half of its low-power value near P = P_c (for small beta)
    below = np.flatnonzero(y < low / 2)
    if below.size:
        j = below[0]
        pc0 = float(np.sqrt(P[j] * P[max(j - 1, 0)]))
    else:
        pc0 = float(P[-1])
    starts = [(b0, pc0), (b0, pc0 * 3), (b0, pc0 / 3)]
    bounds = ([0.0, P.min() * 1e-6], [1.0, P.max() * 1e6])
    res = _run_fit(("beta", "P_c"), _saturation_model, _saturation_jac, starts, P, y, s, bounds,
                   scales=[1.0, pc0])
    res.residuals = res.residuals[np.argsort(order)]
    res.extra["n_c"] = wg.critical_photon_number(res["beta"]) if res["beta"] > 0 else float("inf")
    res.extra["low_power_contrast"] = wg.transmission_contrast(res["beta"])
    return res


# ---------------------------------------------------------------------------
# reflection interference

def reflection_model(w, xi, phi, gamma, center, scale):
    return scale * np.abs(1.0 + xi * np.exp(1j * phi) / (1.0 - 2j * (w - center) / gamma)) ** 2


def _reflection_jac(w, xi, phi, gamma, center, scale):
    u = w - center
    D = 1.0 - 2j * u / gamma
    e = np.exp(1j * phi)
    z = xi * e / D
    F = 1.0 + z
    dz = [
        e / D,
        1j * z,
        -xi * e * (2j * u / gamma**2) / D**2,
        -xi * e * (2j / gamma) / D**2,
    ]
    cols = [2 * scale * np.real(np.conj(F) * d) for d in dz]
    cols.append(np.abs(F) ** 2)
    return np.column_stack(cols)


def _nearest_branch(phi, reference):
    return phi + 2 * np.pi * np.round((reference - phi) / (2 * np.pi))


def fit_reflection(trace: SpectrumTrace, phi_reference: float | None = None,
                   gamma_guess: float | None = None) -> FitResult:
    """Fit ``scale |1 + xi e^{i phi} / (1 - 2i (w - center)/gamma)|^2``.

    ``phi`` is reported on the branch closest to ``phi_reference`` (so a
    sweep can be followed continuously); ``extra["phi_canonical"]`` is the
    same angle in [0, 2 pi). ``flags["flat_reflection"]`` is set when xi is
    consistent with zero (below two standard errors).
    """
    x, y = trace.x, trace.values
    if x.size < 15:
        raise ValueError("reflection fit needs at least 15 points")
    c0, w0, h0, o0 = _peak_guess(x, y)
    span = np.ptp(x)
    g0 = gamma_guess if gamma_guess is not None else min(w0, span / 3)
    scale0 = o0 if o0 > 0 else float(np.median(y))
    xi0 = max(np.ptp(y) / (2 * abs(scale0)), 1e-3)
    # the feature is a peak, dip or dispersive shape; try phases around the circle
    starts = []
    for ph in np.linspace(0, 2 * np.pi, 8, endpoint=False):
        for xs in (xi0, 0.5 * xi0):
            starts.append((xs, ph, g0, c0, scale0))
    # a feature narrower than the sampling, or centred off the grid, is not resolved
    step = float(np.median(np.diff(np.sort(x))))
    g0 = max(g0, 4 * step)
    bounds = ([0.0, -np.inf, 2 * step, x.min(), 0.0],
              [np.inf, np.inf, 10 * span, x.max(), np.inf])
    res = _run_fit(("xi", "phi", "gamma", "center", "scale"), reflection_model, _reflection_jac,
                   starts, x, y, trace.sigma, bounds, scales=[1.0, 1.0, g0, g0, abs(scale0)])
    i_phi = res.names.index("phi")
    ref = np.pi if phi_reference is None else phi_reference
    res.values[i_phi] = _nearest_branch(res.values[i_phi], ref)
    if phi_reference is None:
        res.values[i_phi] = np.mod(res.values[i_phi], 2 * np.pi)
    res.extra["phi_canonical"] = float(np.mod(res["phi"], 2 * np.pi))
    xi, sxi = res["xi"], res.sigma("xi")
    res.flags["flat_reflection"] = bool(xi < 2 * sxi or xi < 1e-6)
    return res


def unwrap_phase_sweep(phases) -> np.ndarray:
    """Remove 2 pi jumps from a sequence of fitted phases."""
    return np.unwrap(np.asarray(phases, float))


def fit_reflection_sweep(traces) -> list:
    """Fit a series of traces, each phase on the branch nearest the previous one."""
    out = []
    ref = None
    for tr in traces:
        r = fit_reflection(tr, phi_reference=ref)
        ref = r["phi"]
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# resonant g2

def _g2_model(t, Gamma, Omega, offset):
    return wg.resonant_g2(t, Gamma, Omega, offset)


def _g2_jac(t, Gamma, Omega, offset):
    return wg.resonant_g2_jacobian(t, Gamma, Omega, offset)


def fit_resonant_g2(trace: CorrelationTrace) -> FitResult:
    """Fit the damped-Rabi correlation (Gamma, Omega, offset) to a g2 trace.

    Starting values: Omega from the first maximum (Omega t ~ pi there) and
    Gamma from the delay where the envelope |g2 - 1 - offset| has decayed by
    e^-1; a small grid around both is tried.
    """
    t = np.abs(trace.tau)
    y = trace.values
    if t.size < 8:
        raise ValueError("g2 fit needs at least 8 points")
    T = float(np.max(t))
    if T <= 0:
        raise ValueError("delay grid must extend beyond zero")
    ts = T / 10.0  # internal time unit
    u = t / ts
    off0 = float(np.min(y[t <= np.min(t) + 1e-15 + 0.02 * T]))
    order = np.argsort(u)
    us, ys = u[order], y[order]
    tail = float(np.median(ys[us > 0.7 * us.max()]))
    env = np.abs(ys - tail)
    thresh = env[0] / np.e
    k = np.flatnonzero(env < thresh)
    tau_e = us[k[0]] if k.size else us.max() / 3
    G0 = max(1.0 / (0.75 * max(tau_e, 1e-6)), 1e-3)
    # first local maximum above the tail
    above = np.flatnonzero((ys[1:-1] > ys[:-2]) & (ys[1:-1] >= ys[2:]) & (ys[1:-1] > tail))
    W0 = np.pi / us[above[0] + 1] if above.size else G0
    starts = [(G0 * a, W0 * b, off0) for a in (0.5, 1.0, 2.0) for b in (0.5, 1.0, 2.0)]
    bounds = ([1e-9, 1e-12, -np.inf], [np.inf, np.inf, np.inf])
    res = _run_fit(("Gamma", "Omega", "offset"), _g2_model, _g2_jac, starts, u, y,
                   trace.sigma, bounds)
    conv = np.array([1 / ts, 1 / ts, 1.0])
    res.values = res.values * conv
    res.covariance = res.covariance * np.outer(conv, conv)
    res.flags["short_grid"] = bool(T * res["Gamma"] < 5)
    return res


def weighted_mean(values, sigmas):
    """Inverse-variance weighted mean and its uncertainty 1 / sqrt(sum 1/sigma^2)."""
    v = np.asarray(values, float)
    s = np.asarray(sigmas, float)
    if v.size == 0 or v.shape != s.shape or np.any(s <= 0):
        raise ValueError("need matching values and positive sigmas")
    w = 1.0 / s**2
    return float(np.sum(w * v) / np.sum(w)), float(1.0 / np.sqrt(np.sum(w)))


# ---------------------------------------------------------------------------
# straight-line fits

def _weighted_lstsq(X, y, sigma):
    w = np.ones_like(y) if sigma is None else 1.0 / np.asarray(sigma, float)
    Xw = X * w[:, None]
    coef, *_ = np.linalg.lstsq(Xw, y * w, rcond=None)
    r = (X @ coef - y) * w
    dof = max(1, y.size - X.shape[1])
    chi2 = float(r @ r / dof)
    cov = _covariance(Xw, chi2, sigma is None)
    return coef, cov, X @ coef - y, chi2


def fit_rabi_power_scaling(powers, omegas, sigmas=None) -> FitResult:
    """Fit Omega = k sqrt(P) through the origin.

    A fit with a free intercept is kept as a diagnostic in ``extra``
    (``intercept``, ``intercept_sigma``, ``slope_free``).
    """
    P = np.asarray(powers, float)
    W = np.asarray(omegas, float)
    if P.size < 3 or P.size != W.size:
        raise ValueError("need at least 3 matching points")
    if np.any(P < 0):
        raise ValueError("powers must be non-negative")
    x = np.sqrt(P)
    coef, cov, resid, chi2 = _weighted_lstsq(x[:, None], W, sigmas)
    res = FitResult(("slope",), coef, cov, resid, chi2, True, 1)
    coef2, cov2, _, _ = _weighted_lstsq(np.column_stack([x, np.ones_like(x)]), W, sigmas)
    res.extra.update(slope_free=float(coef2[0]), intercept=float(coef2[1]),
                     intercept_sigma=float(np.sqrt(max(cov2[1, 1], 0.0))))
    return res


def predict_rabi(result: FitResult, power):
    return result["slope"] * np.sqrt(np.asarray(power, float))


def fit_phase_vs_displacement(displacements, phases, sigmas=None) -> FitResult:
    """Straight-line fit of unwrapped phase against displacement.

    ``extra["period"]`` is the displacement for a 2 pi change, 2 pi / slope;
    it is ``inf`` (with ``flags["infinite_period"]``) when the slope is zero
    to numerical precision.
    """
    z = np.asarray(displacements, float)
    p = np.asarray(phases, float)
    if z.size < 4 or z.size != p.size:
        raise ValueError("need at least 4 matching points")
    coef, cov, resid, chi2 = _weighted_lstsq(np.column_stack([z, np.ones_like(z)]), p, sigmas)
    res = FitResult(("slope", "intercept"), coef, cov, resid, chi2, True, 1)
    flat = abs(coef[0]) * np.ptp(z) <= 1e-12 * max(1.0, np.max(np.abs(p)))
    res.flags["infinite_period"] = bool(flat)
    res.extra["period"] = float("inf") if flat else float(2 * np.pi / abs(coef[0]))
    return res


# ---------------------------------------------------------------------------
# beta from a simulated field trace

@dataclass(frozen=True)
class FieldTrace:
    """Dipole-direction field sampled along the waveguide axis.

    Attributes
    ----------
    z_positions : array
        Positions along propagation (m).
    field_values : array
        Complex field, or its imaginary part, at each position.
    dipole_field : complex
        Field at the dipole location.
    """

    z_positions: np.ndarray
    field_values: np.ndarray
    dipole_field: complex

    def __post_init__(self):
        z = np.asarray(self.z_positions, float)
        f = np.asarray(self.field_values)
        if z.ndim != 1 or z.shape != f.shape:
            raise ValueError("positions and field samples must be matching 1-D arrays")
        if z.size < 20:
            raise ValueError("a field trace needs at least 20 samples")
        object.__setattr__(self, "z_positions", z)
        object.__setattr__(self, "field_values", f)

    @property
    def signal(self) -> np.ndarray:
        f = self.field_values
        return f.imag if np.iscomplexobj(f) else f.astype(float)

    @property
    def dipole_imag(self) -> float:
        return float(np.imag(self.dipole_field)) if np.iscomplexobj(self.dipole_field) else float(self.dipole_field)


def _sinusoid_basis(z, ks):
    return np.column_stack([f(k * z) for k in ks for f in (np.sin, np.cos)])


def _varpro(z, y, ks):
    B = _sinusoid_basis(z, ks)
    coef, *_ = np.linalg.lstsq(B, y, rcond=None)
    return coef, B @ coef - y


def _spectral_peaks(z, y, n):
    zu = np.linspace(z.min(), z.max(), z.size)
    yu = np.interp(zu, z, y)
    pad = 16 * zu.size
    power = np.abs(np.fft.rfft((yu - yu.mean()) * np.hanning(zu.size), n=pad))
    freqs = np.fft.rfftfreq(pad, d=zu[1] - zu[0]) * 2 * np.pi
    peaks = np.flatnonzero((power[1:-1] > power[:-2]) & (power[1:-1] >= power[2:])) + 1
    peaks = peaks[np.argsort(power[peaks])[::-1]]
    return freqs[peaks[:n]]


def beta_from_field_trace(trace: FieldTrace, max_modes: int = 2) -> dict:
    """beta_ideal = A_dominant / |Im E(dipole)| from a sum-of-sinusoids fit.

    The imaginary part along z is fitted with up to ``max_modes`` terms
    A_k sin(k_k z + theta_k). The dominant mode has the largest |A_k|
    (ties go to the smaller wavenumber).

    Returns
    -------
    dict
        ``beta_ideal``, ``mode_amplitudes`` and ``wavenumbers`` (sorted by
        amplitude, dominant first) and ``residual_rms``.

    Raises
    ------
    ModeFitError
        If the best fit leaves a residual above 10% of the signal RMS, or the
        trace spans fewer than two wavelengths of the dominant mode.
    """
    z0 = trace.z_positions
    zc = z0 - z0.mean()
    L = np.ptp(zc)
    zn = zc / L  # work on a unit-length axis
    y = trace.signal
    rms = float(np.sqrt(np.mean(y**2)))
    if rms == 0:
        raise ModeFitError("field trace is identically zero")
    guesses = _spectral_peaks(zn, y, max_modes)
    best = None
    for n in range(1, max_modes + 1):
        if guesses.size < n:
            break
        k0 = np.sort(guesses[:n])
        sol = optimize.least_squares(lambda ks: _varpro(zn, y, ks)[1], k0, method="lm",
                                     xtol=XTOL, ftol=FTOL, max_nfev=MAX_NFEV * 4)
        r = float(np.sqrt(np.mean(sol.fun**2)))
        if best is None or r < 0.5 * best[1]:
            best = (sol.x, r)
    ks, r = best
    if r > 0.1 * rms:
        raise ModeFitError(f"residual RMS {r:.3g} exceeds 10% of signal RMS {rms:.3g}")
    coef, _ = _varpro(zn, y, ks)
    amps = np.hypot(coef[0::2], coef[1::2])
    kabs = np.abs(ks) / L
    order = np.lexsort((kabs, -np.round(amps / amps.max(), 9)))
    amps, kabs = amps[order], kabs[order]
    if kabs[0] * np.ptp(z0) / (2 * np.pi) < 2:
        raise ModeFitError("trace spans fewer than two wavelengths of the dominant mode")
    d = abs(trace.dipole_imag)
    if d == 0:
        raise ModeFitError("dipole field has no imaginary part")
    return {
        "beta_ideal": float(amps[0] / d),
        "mode_amplitudes": amps,
        "wavenumbers": kabs,
        "residual_rms": r,
    }


def effective_beta(beta_ideal, radiative_efficiency=0.37):
    """beta_eff = radiative efficiency x beta_ideal."""
    b = np.asarray(beta_ideal, float)
    e = np.asarray(radiative_efficiency, float)
    if np.any((b < 0) | (b > 1)) or np.any((e < 0) | (e > 1)):
        raise ValueError("inputs must lie in [0, 1]")
    out = b * e
    return float(out) if out.ndim == 0 else out
