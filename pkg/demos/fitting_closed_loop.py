"""Generate noisy traces with known parameters and fit them back.

Run:  python3 demos/fitting_closed_loop.py
"""

import numpy as np

from wgqed import estimation as est
from wgqed import synthetic as syn

rng = np.random.default_rng(7)

# saturation: 10^4 detected photons per power setting
P = np.geomspace(0.01, 30, 60)
y, s = syn.saturation_data(P, 0.143, 0.32, rng)
fit = est.fit_saturation(P, y, s)
print(f"saturation   beta = {fit['beta']:.4f} +- {fit.sigma('beta'):.4f}   "
      f"P_c = {fit['P_c']:.3f} +- {fit.sigma('P_c'):.3f} nW   n_c = {fit.extra['n_c']:.1f}")

# interference lineshape in reflection
w = np.linspace(-150, 150, 121)
tr = syn.reflection_trace(w, 0.6, 1.57, 30.0, rng=rng, noise="gaussian", sigma=0.02)
fit = est.fit_reflection(tr)
print(f"reflection   xi = {fit['xi']:.3f}   phi = {fit['phi']:.3f} rad   gamma = {fit['gamma']:.2f} MHz")

# resonance-fluorescence g2 with Rabi oscillations
tau = np.linspace(-30e-9, 30e-9, 301)
tr = syn.resonant_g2_trace(tau, 1.68e8, 2 * np.pi * 60e6, 0.02, rng, "gaussian", sigma=0.03)
fit = est.fit_resonant_g2(tr)
print(f"resonant g2  Gamma = {fit['Gamma']:.3e} 1/s   Omega/2pi = {fit['Omega'] / 2 / np.pi / 1e6:.1f} MHz")

# spectral diffusion: many scans with wandering centre frequency
x = np.linspace(-200, 200, 801)
tr = syn.jittered_lorentzian_sum(x, 32.1, 200, 7.0, rng)
lor = est.fit_lorentzian(tr)
voi = est.fit_lorentzian(tr, profile="voigt")
print(f"diffusion    single scan 32.1 MHz -> integrated {lor['fwhm']:.1f} MHz (Lorentzian), "
      f"{voi.extra['fwhm']:.1f} MHz (Voigt)")
