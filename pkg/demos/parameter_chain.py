"""From a fitted coupling efficiency beta to the derived device numbers.

Run:  python3 demos/parameter_chain.py
"""

import numpy as np
from scipy import constants

from wgqed import estimation as est
from wgqed import waveguide as wg

beta = 0.143
n_c = wg.critical_photon_number(beta)
print(f"beta                     {beta}")
print(f"low-power extinction     {wg.transmission_contrast(beta):.4f}")
print(f"critical photon number   {n_c:.2f}")
print(f"cooperativity            {wg.cooperativity(beta):.4f}")

# critical power -> fraction of the fibre power reaching the emitter
eta = wg.coupling_efficiency_from_critical_power(0.32e-9, n_c, 26.7e6, constants.c / 619e-9)
print(f"coupling efficiency      {eta:.3f}  (P_c = 0.32 nW, 26.7 MHz, 619 nm)")

conv = wg.lifetime_linewidth_conversions(lifetime=5.91e-9)
print(f"5.91 ns lifetime         {conv['decay_rate'] / 1e6:.1f} MHz decay rate, "
      f"{conv['linewidth'] / 1e6:.2f} MHz linewidth")

# saturation of the dip with probe power
P = np.geomspace(0.01, 30, 7)
for p, c in zip(P, wg.saturation_contrast(P, beta, 0.32)):
    print(f"  P = {p:7.3f} nW   contrast {c:.4f}")

print("simulated beta -> beta_eff (radiative efficiency 0.37)")
for b in (0.507, 0.403, 0.256):
    print(f"  {b:.3f} -> {est.effective_beta(b):.3f}")
