"""Model-generated traces with shot or Gaussian noise.

All generators take a ``numpy.random.Generator``; pass
``numpy.random.default_rng(seed)`` (PCG64) for reproducible data.
"""

from __future__ import annotations

import numpy as np

from . import waveguide as wg
from .estimation import lorentzian
from .traces import CorrelationTrace, SpectrumTrace


def apply_noise(values, rng, noise="none", counts=None, sigma=None):
    """Add noise to model values.

    noise="poisson" draws counts ~ Poisson(counts * value) and returns
    counts / scale with sigma = sqrt(counts) / scale (floored at 1 count);
    noise="gaussian" adds N(0, sigma) (absolute) and returns constant sigma;
    noise="none" returns the values and no sigma.
    """
    v = np.asarray(values, float)
    if noise == "none":
        return v.copy(), None
    if noise == "poisson":
        if counts is None or counts <= 0:
            raise ValueError("poisson noise needs a positive counts scale")
        if np.any(v < 0):
            raise ValueError("poisson noise needs non-negative model values")
        k = rng.poisson(counts * v).astype(float)
        return k / counts, np.sqrt(np.maximum(k, 1.0)) / counts
    if noise == "gaussian":
        if sigma is None or sigma <= 0:
            raise ValueError("gaussian noise needs a positive sigma")
        return v + rng.normal(0.0, sigma, v.shape), np.full(v.shape, float(sigma))
    raise ValueError(f"unknown noise model {noise!r}")


def lorentzian_trace(x, center, fwhm, height, offset, rng=None, noise="none", counts=None, sigma=None):
    rng = np.random.default_rng() if rng is None else rng
    y, s = apply_noise(lorentzian(np.asarray(x, float), center, fwhm, height, offset), rng, noise, counts, sigma)
    return SpectrumTrace(x, y, s, channel="lorentzian")


def jittered_lorentzian_sum(x, fwhm, n_scans, jitter, rng, height=1.0):
    """Sum of ``n_scans`` unit Lorentzians with Gaussian-jittered centres."""
    x = np.asarray(x, float)
    centers = rng.normal(0.0, jitter, n_scans)
    y = np.sum(height / (1.0 + (2.0 * (x[None, :] - centers[:, None]) / fwhm) ** 2), axis=0)
    return SpectrumTrace(x, y, channel="integrated")


def saturation_data(powers, beta, P_c, rng, counts=1e4, noise="poisson", sigma=None):
    """Contrast versus power.

    With Poisson noise the transmitted counts per point are
    Poisson(counts * T) with T = 1 - contrast, so the contrast estimate is
    1 - k / counts with sigma sqrt(k) / counts.
    """
    P = np.asarray(powers, float)
    contrast = wg.saturation_contrast(P, beta, P_c)
    if noise == "poisson":
        t, s = apply_noise(1.0 - contrast, rng, "poisson", counts)
        return 1.0 - t, s
    if noise == "gaussian":
        return apply_noise(contrast, rng, "gaussian", sigma=sigma)
    return contrast.copy(), None


def reflection_trace(x, xi, phi, gamma, center=0.0, scale=1.0, rng=None, noise="none",
                     counts=None, sigma=None, relative=True):
    """Reflection trace; Gaussian ``sigma`` is relative to each value when ``relative``."""
    rng = np.random.default_rng() if rng is None else rng
    x = np.asarray(x, float)
    y0 = scale * wg.reflection(wg.ReflectionParams(xi, phi, gamma), x - center)
    if noise == "gaussian" and relative:
        s = sigma * np.abs(y0)
        return SpectrumTrace(x, y0 + rng.normal(0, 1, x.shape) * s, s, channel="reflection")
    y, s = apply_noise(y0, rng, noise, counts, sigma)
    return SpectrumTrace(x, y, s, channel="reflection")


def resonant_g2_trace(tau, Gamma, Omega, offset, rng=None, noise="none", sigma=None, counts=None):
    rng = np.random.default_rng() if rng is None else rng
    y0 = wg.resonant_g2(tau, Gamma, Omega, offset)
    y, s = apply_noise(y0, rng, noise, counts, sigma)
    return CorrelationTrace(tau, y, channel_pair="PP", sigma=s)
