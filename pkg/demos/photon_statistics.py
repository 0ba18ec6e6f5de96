"""Photon statistics of the three-mode model in transmission, sideband and reflection.

Writes g2 curves to demos/out/g2_curves.csv.

Run:  python3 demos/photon_statistics.py
"""

from pathlib import Path

import numpy as np

from wgqed import master_equation as me

cfg = me.default_config(0.143)
print(f"calibrated cross-coupling multiplier {cfg.cross_coupling_scale:.6f}")
print(f"effective cavity linewidth           {me.effective_cavity_linewidth(cfg):.1f} gamma")
print(f"emitter-cavity coupling g            {cfg.g:.4f} gamma")

lab = me.build_system(cfg)
tau = np.linspace(-10, 10, 81)
curves = {"TT": me.g2(lab, "T", "T", tau).values, "PT": me.g2(lab, "P", "T", tau).values}

# reflection: interfere the scattered field with a coherent reference
xi = 0.48
for label, phi in (("constructive", 6.28), ("dispersive", 1.57), ("destructive", 3.41)):
    sys_ = me.build_system(cfg, me.alpha_for_reflection(cfg, xi, phi))
    curves[f"RR_{label}"] = me.g2(sys_, "R", "R", tau).values

i0 = np.argmin(np.abs(tau))
for name, vals in curves.items():
    print(f"g2_{name:<16s}(0) = {vals[i0]:.4f}")

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
np.savetxt(out / "g2_curves.csv", np.column_stack([tau, *curves.values()]), delimiter=",",
           header="tau_over_gamma," + ",".join(curves), comments="")
print(f"wrote {out / 'g2_curves.csv'}")
