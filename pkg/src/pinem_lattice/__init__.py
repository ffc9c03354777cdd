"""Synthetic energy-lattice dynamics of laser-modulated free electrons.

Three solvers describe the PINEM sideband amplitudes ``a_n``:

* :mod:`~pinem_lattice.tba`, the tight-binding coupled-mode integrator,
* :mod:`~pinem_lattice.analytic`, Bessel closed forms and band formulas,
* :mod:`~pinem_lattice.tdse`, a Crank-Nicolson solver for the real-space
  envelope.

:mod:`~pinem_lattice.protocols` builds the drive programs on top of them
and :mod:`~pinem_lattice.io` handles configs and trace files.
"""

__version__ = "0.1.0"

from .analytic import (BandPoint, GaussianEnvelopeSpec, WannierStarkLadder, band,
                       breathing_amplitude, closed_form_propagate, displacement, gaussian_bo,
                       pinem_limit, wannier_stark)
from .constants import CODATA, PhysicalConstants
from .errors import (BoundaryMassError, ConfigError, DomainError, GridMismatchError,
                     NumericalGuardError, PinemError, WindowOverflowError)
from .io import ComparisonReport, RunConfig, compare_traces, parse_config, serialize, write_trace
from .params import (BeamKinematics, DriveParams, LatticeModel, derive_kinematics,
                     derive_lattice)
from .protocols import ModulationStep, ScenarioSpec, TalbotInput, run_scenario
from .tba import (Schedule, Segment, SidebandState, TraceRecord, apply_phase_modulation,
                  derivative, evolve, observables)
from .tdse import (GridWavefunction, TdseConfig, build_step_matrices, cn_step,
                   extract_sidebands, make_initial_wavepacket)
