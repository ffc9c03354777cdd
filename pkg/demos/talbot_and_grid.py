"""
Self-imaging and the real-space check
=====================================

An alternating comb of sidebands revives under a synchronized drive.  The
second part runs the same breathing problem on a real-space grid and
compares the extracted sideband populations with the lattice model.
"""

import numpy as np

from pinem_lattice import LatticeModel, derive_kinematics
from pinem_lattice.constants import CODATA
from pinem_lattice.io import compare_traces
from pinem_lattice.protocols import (TalbotInput, run_breathing, run_talbot, talbot_model,
                                     talbot_oracle, tdse_trace)

talbot = TalbotInput(2, (1, -1))
model = talbot_model(0.7)
res = run_talbot(talbot, model, duration=10.0, samples=1001, repeats=16)
oracle = talbot_oracle(talbot.state(16), model, res.trace.times)
print("revivals (t, C):", [(round(t, 3), round(c, 4)) for t, c in res.revivals])
print("largest deviation from dense diagonalization", np.abs(res.correlation - oracle).max())

# real-space grid vs lattice over one Bloch period
w_l = 1.2 / CODATA.hbar
model = LatticeModel.create(0.7, 1.0, w_l)
tba = run_breathing(model, model.bloch_period, samples=21)
half = (tba.window[1] - tba.window[0]) // 2
for ppp in (64, 128):
    grid = tdse_trace("breathing", model, derive_kinematics(200e3), model.bloch_period, 21, half,
                      points_per_period=ppp)
    print(f"{ppp:4d} points per period: L2 = {compare_traces(tba, grid).l2_error:.2e}")
