"""
Breathing and oscillation on the energy lattice
===============================================

A single sideband under a detuned drive spreads and refocuses once per
Bloch period.  A broad Gaussian envelope instead swings back and forth
without changing shape.
"""

import math

import numpy as np

from pinem_lattice import LatticeModel
from pinem_lattice.constants import CODATA
from pinem_lattice.analytic import breathing_amplitude, oscillation_offset
from pinem_lattice.protocols import breathing_variance, run_bloch_oscillation, run_breathing

# 1.2 eV photons, |kappa| = 0.7 /fs, detuning 1 rad/fs
w_l = 1.2 / CODATA.hbar
model = LatticeModel.create(0.7, 1.0, w_l)
print(f"Bloch period {model.bloch_period:.3f} fs")

# single-sideband input: the width breathes
trace = run_breathing(model, samples=9)
for t, var in zip(trace.times, trace.variance_x):
    print(f"t = {t:6.3f} fs   std = {math.sqrt(max(var, 0)):6.3f} rad/fs   "
          f"law {math.sqrt(breathing_variance(t, model)):6.3f}")

# the closed form agrees to integrator precision
exact = np.abs(breathing_amplitude(trace.indices[None, :], trace.times[:, None], model)) ** 2
print("largest population error", np.abs(trace.spectra - exact).max())

# Gaussian envelope, 10 photon energies wide: the centroid oscillates
model = model.replace(phase_delay=math.pi / 2)
trace = run_bloch_oscillation(model, 10 * w_l, samples=9)
predicted = 4 * 0.7 * w_l / 1.0 * oscillation_offset(trace.times, model)
for t, m, p in zip(trace.times, trace.mean_x, predicted):
    print(f"t = {t:6.3f} fs   mean = {m:7.3f}   predicted {p:7.3f}")
