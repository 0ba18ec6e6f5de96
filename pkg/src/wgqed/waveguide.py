"""Closed-form emitter-waveguide physics.

All rates and detunings are angular (rad/s) unless a name says otherwise
(``*_hz``). Formulas are vectorised over array inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import (
    DivergentCooperativity,
    DivergentSaturation,
    InconsistentParameters,
    UnsupportedInFormula,
)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class EmitterWaveguideParams:
    """Analytic-model parameters.

    Attributes
    ----------
    beta : float
        Waveguide coupling factor, gamma_wg / gamma_total.
    gamma_total : float
        Total decay rate (rad/s), equal to 1/lifetime.
    gamma_dephasing : float
        Pure dephasing rate (rad/s).
    optical_frequency : float
        Transition frequency nu in Hz.
    coupling_efficiency : float
        Fibre-to-waveguide efficiency eta.
    """

    beta: float
    gamma_total: float
    gamma_dephasing: float = 0.0
    optical_frequency: float = constants.c / 619e-9
    coupling_efficiency: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not self.gamma_total > 0:
            raise ValueError("gamma_total must be positive")
        if self.gamma_dephasing < 0:
            raise ValueError("gamma_dephasing must be non-negative")
        if not 0.0 <= self.coupling_efficiency <= 1.0:
            raise ValueError("coupling_efficiency must lie in [0, 1]")

    @property
    def gamma_wg(self) -> float:
        return self.beta * self.gamma_total


@dataclass(frozen=True)
class ReflectionParams:
    """Interference parameters of the reflected signal.

    ``phi`` is kept as given (fits may report values past 2 pi);
    ``phi_canonical`` is the same angle in [0, 2 pi).
    """

    xi: float
    phi: float
    gamma_total: float

    def __post_init__(self):
        if self.xi < 0:
            raise ValueError("xi must be non-negative")
        if not self.gamma_total > 0:
            raise ValueError("gamma_total must be positive")

    @property
    def phi_canonical(self) -> float:
        return float(np.mod(self.phi, TWO_PI))


@dataclass(frozen=True)
class DriveParams:
    mean_photon_number: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.mean_photon_number) < 0):
            raise ValueError("mean_photon_number must be non-negative")


def critical_photon_number(beta):
    """n_c = 1 / (4 beta^2)."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise DivergentSaturation("critical photon number diverges for beta = 0")
    out = 1.0 / (4.0 * beta**2)
    return float(out) if out.ndim == 0 else out


def _amplitude(beta, saturation):
    return beta / (1.0 + saturation)


def transmission_from_saturation(beta, saturation, detuning, gamma_total):
    """|1 - beta / ((1 + s)(1 + 2i w / gamma))|^2 with s = <n>/n_c."""
    a = _amplitude(np.asarray(beta, float), np.asarray(saturation, float))
    t = 1.0 - a / (1.0 + 2j * np.asarray(detuning, float) / gamma_total)
    return np.abs(t) ** 2


def transmission(params: EmitterWaveguideParams, drive: DriveParams):
    """Transmission of a weak coherent probe past the emitter.

    Raises
    ------
    UnsupportedInFormula
        If ``params.gamma_dephasing > 0``; use :func:`transmission_contrast`.
    """
    if params.gamma_dephasing > 0:
        raise UnsupportedInFormula(
            "transmission formula assumes no pure dephasing; use transmission_contrast"
        )
    if params.beta == 0:
        sat = 0.0
    else:
        sat = np.asarray(drive.mean_photon_number, float) / critical_photon_number(params.beta)
    return transmission_from_saturation(params.beta, sat, drive.detuning, params.gamma_total)


def transmission_dip(beta, saturation, detuning, gamma_total):
    """Same as :func:`transmission_from_saturation`, written as a Lorentzian dip."""
    a = _amplitude(np.asarray(beta, float), np.asarray(saturation, float))
    x = 2.0 * np.asarray(detuning, float) / gamma_total
    return 1.0 - (2 * a - a**2) / (1.0 + x**2)


def transmission_contrast(beta, gamma_dephasing=0.0, gamma_total=1.0):
    """On-resonance low-power extinction beta(2 - beta) / (1 + 2 gamma_deph / gamma_tot)."""
    beta = np.asarray(beta, float)
    out = beta * (2.0 - beta) / (1.0 + 2.0 * np.asarray(gamma_dephasing, float) / gamma_total)
    return float(out) if out.ndim == 0 else out


def beta_from_contrast(contrast):
    """Invert contrast = beta(2 - beta), taking the root in [0, 1]."""
    c = np.asarray(contrast, float)
    if np.any((c < 0) | (c > 1)):
        raise ValueError("contrast must lie in [0, 1]")
    out = 1.0 - np.sqrt(1.0 - c)
    return float(out) if out.ndim == 0 else out


def reflection(params: ReflectionParams, detuning):
    """|1 + xi e^{i phi} / (1 - 2i w / gamma)|^2, relative to far-detuned reflection."""
    w = np.asarray(detuning, float)
    field = 1.0 + params.xi * np.exp(1j * params.phi) / (1.0 - 2j * w / params.gamma_total)
    return np.abs(field) ** 2


def coupling_efficiency_from_critical_power(
    P_c, n_c, linewidth_hz, optical_frequency, linewidth_unit="hz"
):
    """eta = h nu n_c gamma / P_c.

    Parameters
    ----------
    P_c : float
        Critical power in watts.
    n_c : float
        Critical photon number.
    linewidth_hz : float
        Transition linewidth gamma_tot / 2 pi in Hz.
    optical_frequency : float
        nu in Hz.
    linewidth_unit : {"hz", "angular"}
        ``"hz"`` (default) uses the linewidth as given. ``"angular"`` uses
        2 pi times it, the alternative reading kept for comparison; with the
        measured numbers it yields eta > 1.

    Raises
    ------
    InconsistentParameters
        If the resulting efficiency exceeds 1.
    """
    for name, v in (("P_c", P_c), ("n_c", n_c), ("linewidth_hz", linewidth_hz),
                    ("optical_frequency", optical_frequency)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    if linewidth_unit == "hz":
        rate = linewidth_hz
    elif linewidth_unit == "angular":
        rate = TWO_PI * linewidth_hz
    else:
        raise ValueError("linewidth_unit must be 'hz' or 'angular'")
    eta = constants.h * optical_frequency * n_c * rate / P_c
    if eta > 1.0:
        raise InconsistentParameters(f"coupling efficiency {eta:.3g} exceeds 1")
    return float(eta)


def cooperativity(beta):
    """C = beta / (1 - beta)."""
    beta = np.asarray(beta, float)
    if np.any(beta >= 1):
        raise DivergentCooperativity("cooperativity diverges at beta = 1")
    if np.any(beta < 0):
        raise ValueError("beta must be non-negative")
    out = beta / (1.0 - beta)
    return float(out) if out.ndim == 0 else out


def cavity_g_from_cooperativity(C, kappa, gamma):
    """g = sqrt(C kappa gamma / 4)."""
    if kappa <= 0 or gamma <= 0:
        raise ValueError("kappa and gamma must be positive")
    if C < 0:
        raise ValueError("cooperativity must be non-negative")
    return float(np.sqrt(C * kappa * gamma / 4.0))


def resonant_g2(tau, Gamma, Omega, offset=0.0):
    """Damped-Rabi intensity correlation under resonant drive.

    g2 = 1 - exp(-3 Gamma |t| / 4) [cos(Omega t) + (3 Gamma / 4 Omega) sin(Omega t)] + offset

    The sine term is written as (3 Gamma / 4) t sinc(Omega t), so Omega = 0
    gives the exact limit 1 - exp(-3 Gamma t / 4)(1 + 3 Gamma t / 4) + offset.
    """
    if Gamma <= 0:
        raise ValueError("Gamma must be positive")
    if Omega < 0:
        raise ValueError("Omega must be non-negative")
    t = np.abs(np.asarray(tau, float))
    k = 0.75 * Gamma
    # np.sinc(x) = sin(pi x)/(pi x)
    osc = np.cos(Omega * t) + k * t * np.sinc(Omega * t / np.pi)
    return 1.0 - np.exp(-k * t) * osc + offset


def resonant_g2_jacobian(tau, Gamma, Omega, offset=0.0):
    """Partial derivatives of :func:`resonant_g2` w.r.t. (Gamma, Omega, offset)."""
    t = np.abs(np.asarray(tau, float))
    k = 0.75 * Gamma
    e = np.exp(-k * t)
    c, s = np.cos(Omega * t), np.sin(Omega * t)
    sinc_t = t * np.sinc(Omega * t / np.pi)  # sin(W t)/W
    osc = c + k * sinc_t
    d_k = t * e * osc - e * sinc_t
    # d/dW [sin(W t)/W] = (t cos(W t) - sin(W t)/W)/W, with limit -t^3 W/3 -> 0
    with np.errstate(divide="ignore", invalid="ignore"):
        dsinc = np.where(np.abs(Omega * t) > 1e-6,
                         (t * c - sinc_t) / np.where(Omega == 0, 1.0, Omega),
                         -(t**3) * Omega / 3.0)
    d_W = -e * (-t * s + k * dsinc)
    return np.column_stack([0.75 * d_k, d_W, np.ones_like(t)])


def lifetime_linewidth_conversions(lifetime=None, decay_rate=None, linewidth=None):
    """Convert between lifetime (s), decay rate (1/s) and linewidth (Hz).

    Exactly one argument must be given. decay_rate = 1/lifetime and
    linewidth = decay_rate / 2 pi.

    Returns
    -------
    dict with keys ``lifetime``, ``decay_rate``, ``linewidth``.
    """
    given = [x for x in (lifetime, decay_rate, linewidth) if x is not None]
    if len(given) != 1:
        raise ValueError("give exactly one of lifetime, decay_rate, linewidth")
    if not given[0] > 0:
        raise ValueError("input must be positive")
    if lifetime is not None:
        decay_rate = 1.0 / lifetime
    elif linewidth is not None:
        decay_rate = TWO_PI * linewidth
    return {
        "lifetime": 1.0 / decay_rate,
        "decay_rate": float(decay_rate),
        "linewidth": decay_rate / TWO_PI,
    }


def saturation_contrast(power, beta, P_c):
    """On-resonance contrast 1 - T(0) at <n>/n_c = P / P_c."""
    x = np.asarray(power, float) / P_c
    a = beta / (1.0 + x)
    return 2 * a - a**2
