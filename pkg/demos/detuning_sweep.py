"""
Spectral spread against detuning
================================

With a fixed interaction length the peak spread of the sideband spectrum
falls off as 1/detuning once the electron sees a full Bloch period.
"""

import numpy as np

from pinem_lattice import derive_kinematics
from pinem_lattice.protocols import fit_power_law, run_detuning_sweep

beam = derive_kinematics(200e3)
t_int = 13.0 / beam.velocity  # 13 um interaction length
print(f"200 keV: beta = {beam.beta:.4f}, interaction time {t_int:.1f} fs")

detunings = np.geomspace(1.0, 10.0, 5)
rows = run_detuning_sweep(0.7, detunings, t_int, samples=301)
for r in rows:
    print(f"detuning {r.detuning:6.3f} rad/fs   peak spread {r.peak_spread:.4f}")

p, a = fit_power_law(detunings, [r.peak_spread for r in rows])
print(f"spread ~ {a:.3f} * detuning^{p:.4f}")
