"""
Pumping energy and refocusing with drive switches
=================================================

Flipping the drive phase by pi every half Bloch period rectifies the
oscillation into steady acceleration.  A chain of phase kicks whose
vectors close into a polygon undoes itself exactly.
"""

import math

import numpy as np

from pinem_lattice import LatticeModel
from pinem_lattice.protocols import closed_polygon, run_acceleration, run_lensing

model = LatticeModel.create(0.7, 1.0, 1.0, 1.5 * math.pi)
for method in ("phase", "detuning"):
    res = run_acceleration(model, cycles=3, method=method)
    steps = ", ".join(f"{m:.2f}" for m in res.half_period_means)
    print(f"{method:9s} flips: centroid at half periods [{steps}]")
print(f"expected step per half period {res.predicted_increment:.3f}")

# a triangle of kicks, then the same triangle with one side stretched
rng = np.random.default_rng(0)
print("random closed polygon:", f"{run_lensing(closed_polygon(rng, 5)).fidelity:.12f}")
broken = [(1.0, 0.0), (1.0, 2 * math.pi / 3), (1.3, 4 * math.pi / 3)]
res = run_lensing(broken)
print(f"broken polygon, residual {res.residual:.2f}: fidelity {res.fidelity:.4f}")
