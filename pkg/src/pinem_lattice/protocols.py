"""Scenario library: drive programs built on the three solvers.

Each ``run_*`` function is a deterministic map from parameters to traces and
derived measurements.  :func:`run_scenario` dispatches a
:class:`ScenarioSpec` to the matching function.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import analytic, tdse
from .errors import DomainError
from .params import LatticeModel
from .tba import (Schedule, Segment, SidebandState, TraceRecord, apply_phase_modulation,
                  default_window, evolve)

KINDS = ("bloch_oscillation", "breathing", "detuning_sweep", "acceleration",
         "diffraction", "refraction", "lensing", "talbot")
SOLVERS = ("tba", "analytic", "tdse", "all")
PHASE_DELAYS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


@dataclass(frozen=True)
class ScenarioSpec:
    """One run request.

    ``params`` holds the kind-specific settings documented on each
    ``run_*`` function; ``beam`` is only needed by the grid solver.
    """

    kind: str
    model: LatticeModel
    solver: str = "tba"
    params: dict = field(default_factory=dict)
    samples: int = 201
    beam: object = None
    step: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown scenario kind {self.kind!r}")
        if self.solver not in SOLVERS:
            raise DomainError(f"unknown solver {self.solver!r}")
        if self.samples < 2:
            raise DomainError("need at least two samples")


@dataclass(frozen=True)
class ScenarioResult:
    traces: dict
    summary: dict


def _gaussian_half_width(model, duration, sites):
    if model.detuning != 0:
        reach = 4.0 * model.kappa_mag / abs(model.detuning)
    else:
        reach = 2.0 * model.kappa_mag * duration
    return int(math.ceil(reach + 8.0 * sites)) + 20


def _default_duration(model, periods=2.0):
    return periods * model.bloch_period if model.detuning != 0 else 10.0


# --- breathing and oscillation -------------------------------------------

def breathing_variance(t, model):
    """Variance of a single-sideband input, ``(4|k|^2 w^2/dw^2)(1 - cos dw t)``."""
    t = np.asarray(t, dtype=float)
    k, w, dw = model.kappa_mag, model.lattice_constant, model.detuning
    if dw == 0:
        return 2.0 * (k * w * t) ** 2
    return 4.0 * (k * w / dw) ** 2 * (1.0 - np.cos(dw * t))


def run_breathing(model, duration=None, samples=201, half_width=None, step=None,
                  keep_amplitudes=False):
    """Single-sideband input evolved by the tight-binding solver."""
    duration = _default_duration(model) if duration is None else duration
    if half_width is None:
        half_width = default_window(model.kappa_mag, model.detuning, duration)
    return evolve(SidebandState.delta(half_width), Schedule.constant(model, duration), model,
                  step=step, samples=samples, keep_amplitudes=keep_amplitudes)


def run_bloch_oscillation(model, sigma_en=None, duration=None, samples=201, half_width=None,
                          step=None, keep_amplitudes=False):
    """Gaussian-envelope input of width ``sigma_en`` (default ``10 w_L``).

    Raises
    ------
    DomainError
        If ``sigma_en < 2 w_L``; between ``2 w_L`` and ``5 w_L`` a
        :class:`~pinem_lattice.analytic.ValidityWarning` is issued.
    """
    w_l = model.lattice_constant
    sigma_en = 10.0 * w_l if sigma_en is None else sigma_en
    if sigma_en < 2.0 * w_l:
        raise DomainError(f"sigma_en = {sigma_en:g} is below 2 w_L; no oscillation regime")
    spec = analytic.GaussianEnvelopeSpec(sigma_en)
    spec.check_validity(w_l)
    duration = _default_duration(model) if duration is None else duration
    if half_width is None:
        half_width = _gaussian_half_width(model, duration, sigma_en / w_l)
    return evolve(spec.state(w_l, half_width), Schedule.constant(model, duration), model,
                  step=step, samples=samples, keep_amplitudes=keep_amplitudes)


def oscillation_peak(model):
    """Largest ``|mean_x|`` of the Gaussian oscillation, ``(4|k| w/|dw|) max_t |d(t)|``.

    ``d = (sin(dw t + phi0) - sin(phi0)) / 2`` ranges over
    ``[(-1 - sin phi0)/2, (1 - sin phi0)/2]``, so ``max |d| = (1 + |sin phi0|)/2``.
    """
    amp = 4.0 * model.kappa_mag * model.lattice_constant / abs(model.detuning)
    return amp * 0.5 * (1.0 + abs(math.sin(model.phase_delay)))


def analytic_trace(kind, model, times, half_width, sigma_en=None):
    """Closed-form trace on the window ``[-half_width, half_width]``."""
    n = np.arange(-half_width, half_width + 1)
    times = np.asarray(times, dtype=float)
    if kind == "breathing":
        if model.detuning == 0:
            amps = analytic.pinem_limit(n[None, :], times[:, None], model.kappa_mag, model.phase_delay)
        else:
            amps = analytic.breathing_amplitude(n[None, :], times[:, None], model)
    elif kind == "bloch_oscillation":
        spec = analytic.GaussianEnvelopeSpec(sigma_en)
        amps = [analytic.gaussian_bo(spec, t, model, half_width)[0].amplitudes for t in times]
    elif kind == "diffraction":
        start = analytic.GaussianEnvelopeSpec(sigma_en).state(model.lattice_constant, half_width)
        amps = [apply_phase_modulation(start, 2.0 * model.kappa_mag * t, model.phase_delay).amplitudes
                for t in times]
    else:
        raise DomainError(f"no closed form for scenario {kind!r}")
    return TraceRecord.from_amplitudes(times, amps, (-half_width, half_width), model.lattice_constant)


def tdse_trace(kind, model, beam, duration, samples, half_width, sigma_en=None,
               periods=32, points_per_period=128, courant=0.5):
    """Grid-solver trace projected onto ``[-half_width, half_width]``."""
    if beam is None:
        raise DomainError("the grid solver needs beam kinematics")
    config = tdse.TdseConfig.from_lattice(model, beam, periods, points_per_period, courant)
    if kind == "breathing":
        source = None
    elif kind in ("bloch_oscillation", "diffraction"):
        source = analytic.GaussianEnvelopeSpec(sigma_en).state(model.lattice_constant, half_width)
    else:
        raise DomainError(f"grid solver does not support scenario {kind!r}")
    psi = tdse.make_initial_wavepacket(config, source)
    trace, _ = tdse.propagate(psi, config, duration, samples, (-half_width, half_width))
    return trace


# --- detuning sweep ------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    detuning: float
    final_mean_x: float
    final_spread: float
    peak_spread: float


def run_detuning_sweep(kappa_mag, detunings, interaction_time, lattice_constant=1.0,
                       phase_delay=0.0, samples=401, step=None):
    """Single-sideband runs over a list of detunings at fixed interaction time.

    Spread is ``sqrt(variance_x)``; ``peak_spread`` is its maximum over the
    run.  A detuning of exactly zero uses the synchronized closed form.
    """
    rows = []
    for dw in detunings:
        model = LatticeModel.create(kappa_mag, dw, lattice_constant, phase_delay)
        if dw == 0:
            times = np.linspace(0.0, interaction_time, samples)
            spread = np.sqrt(breathing_variance(times, model))
            rows.append(SweepRow(0.0, 0.0, float(spread[-1]), float(spread.max())))
            continue
        trace = run_breathing(model, interaction_time, samples, step=step)
        spread = np.sqrt(np.clip(trace.variance_x, 0.0, None))
        rows.append(SweepRow(float(dw), float(trace.mean_x[-1]), float(spread[-1]),
                             float(spread.max())))
    return rows


def fit_power_law(x, y):
    """Exponent ``p`` and prefactor ``A`` of a least-squares fit ``y = A x^p``."""
    p, log_a = np.polyfit(np.log(x), np.log(y), 1)
    return float(p), float(np.exp(log_a))


# --- acceleration --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AccelerationResult:
    trace: TraceRecord
    half_period_times: np.ndarray
    half_period_means: np.ndarray
    increments: np.ndarray
    predicted_increment: float
    field_formula_increment: float

    @property
    def monotone(self):
        return bool(np.all(np.diff(self.half_period_means) >= 0)
                    or np.all(np.diff(self.half_period_means) <= 0))

    @property
    def field_formula_ratio(self):
        return self.field_formula_increment / float(np.mean(np.abs(self.increments)))


def acceleration_schedule(model, cycles, method="phase"):
    """Half-period segments flipping either ``phi0`` by ``pi`` or the detuning sign."""
    if model.detuning == 0:
        raise DomainError("acceleration needs a non-zero detuning")
    if cycles < 0 or int(cycles) != cycles:
        raise DomainError("cycles must be a non-negative integer")
    half = 0.5 * model.bloch_period
    segments = []
    for k in range(2 * int(cycles)):
        if method == "phase":
            segments.append(Segment(half, model.phase_delay + math.pi * (k % 2)))
        elif method == "detuning":
            segments.append(Segment(half, model.phase_delay, detuning_sign=1 - 2 * (k % 2)))
        else:
            raise DomainError(f"unknown switching method {method!r}")
    return Schedule(tuple(segments))


def half_cycle_shift(model):
    """Centroid shift per half Bloch period, ``(4|kappa| w_L/|dw|) |sin phi0|``."""
    return 4.0 * model.kappa_mag * model.lattice_constant / abs(model.detuning) * abs(
        math.sin(model.phase_delay))


def field_formula_shift(model):
    """Half-cycle shift written as ``2 e E0 v T_B |sin phi0| / hbar``.

    Uses ``e E0 v / hbar = 2 |kappa| w_L``.
    """
    return 2.0 * (2.0 * model.kappa_mag * model.lattice_constant) * model.bloch_period * abs(
        math.sin(model.phase_delay))


def run_acceleration(model, cycles=2, method="phase", sigma_en=None, samples_per_half=50,
                     step=None):
    """Unidirectional energy transfer by switching every half Bloch period.

    The input is a Gaussian envelope (default ``sigma_en = 10 w_L``).  Each
    half period the centroid moves by :func:`half_cycle_shift` in the same
    direction.
    """
    w_l = model.lattice_constant
    sigma_en = 10.0 * w_l if sigma_en is None else sigma_en
    halves = 2 * int(cycles)
    if halves == 0:
        state = analytic.GaussianEnvelopeSpec(sigma_en).state(w_l)
        trace = TraceRecord.from_amplitudes([0.0], [state.amplitudes], state.window, w_l)
        return AccelerationResult(trace, np.array([0.0]), np.array([0.0]), np.array([]),
                                  half_cycle_shift(model), field_formula_shift(model))
    schedule = acceleration_schedule(model, cycles, method)
    reach = halves * half_cycle_shift(model) / w_l
    half_width = int(math.ceil(reach + 8.0 * sigma_en / w_l)) + 20
    start = analytic.GaussianEnvelopeSpec(sigma_en).state(w_l, half_width)
    trace = evolve(start, schedule, model, step=step, samples=halves * samples_per_half + 1,
                   keep_amplitudes=True)
    idx = np.arange(0, trace.times.size, samples_per_half)
    means = trace.mean_x[idx]
    return AccelerationResult(trace, trace.times[idx], means, np.diff(means),
                              half_cycle_shift(model), field_formula_shift(model))


def temporal_density(amplitudes, lattice_constant, points=256, window=None):
    """Density ``|sum_n a_n exp(-i n w_L s)|^2`` over one optical period.

    ``s = t - z/v`` is the local time in the frame moving with the electron.
    Averaged over the period the density equals ``sum |a_n|^2``.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if window is None:
        half = (amplitudes.size - 1) // 2
        window = (-half, amplitudes.size - 1 - half)
    n = np.arange(window[0], window[1] + 1)
    s = np.linspace(0.0, 2.0 * math.pi / lattice_constant, points, endpoint=False)
    field_ = np.exp(-1j * lattice_constant * np.outer(s, n)) @ amplitudes
    return s, np.abs(field_) ** 2


# --- diffraction and refraction -----------------------------------------

@dataclass(frozen=True, eq=False)
class DiffractionCase:
    phase_delay: float
    trace: TraceRecord
    drift_rate: float
    variance_change: float
    group_velocity: float
    diffraction: float

    @property
    def expected_drift_sign(self):
        # the sideband centroid moves against the band group velocity
        return int(np.sign(np.round(-self.group_velocity, 12)))

    @property
    def expected_widening(self):
        return abs(self.diffraction) > 1e-12

    @property
    def measured_drift_sign(self):
        # rates below 0.1% of the band scale count as no drift
        scale = abs(self.group_velocity) + abs(self.diffraction)
        return 0 if abs(self.drift_rate) < 1e-3 * scale else int(np.sign(self.drift_rate))

    @property
    def measured_widening(self):
        return self.variance_change > 0.03

    @property
    def classified(self):
        return (self.measured_drift_sign == self.expected_drift_sign
                and self.measured_widening == self.expected_widening)


def slope(times, values, lo=0.0, hi=1.0):
    """Least-squares slope of ``values`` over the fraction ``[lo, hi]`` of ``times``."""
    times = np.asarray(times)
    t0, t1 = times[0], times[-1]
    mask = (times >= t0 + lo * (t1 - t0) - 1e-12) & (times <= t0 + hi * (t1 - t0) + 1e-12)
    return float(np.polyfit(times[mask], np.asarray(values)[mask], 1)[0])


def run_diffraction(kappa_mag, lattice_constant=1.0, sigma_en=None, duration=10.0,
                    phase_delays=PHASE_DELAYS, samples=201, step=None):
    """Synchronized Gaussian input at ``k = 0`` for each drive phase.

    Returns a dict ``phase_delay -> DiffractionCase`` with the measured
    centroid drift rate and relative variance change next to the band
    velocity and diffraction at ``k = 0``.
    """
    sigma_en = 4.0 * lattice_constant if sigma_en is None else sigma_en
    cases = {}
    for phi in phase_delays:
        model = LatticeModel.create(kappa_mag, 0.0, lattice_constant, phi)
        trace = run_bloch_oscillation(model, sigma_en, duration, samples, step=step) \
            if sigma_en >= 5.0 * lattice_constant else _quiet_gaussian(model, sigma_en, duration, samples, step)
        point = analytic.band(0.0, 0.0, model)
        cases[phi] = DiffractionCase(
            phase_delay=phi,
            trace=trace,
            drift_rate=slope(trace.times, trace.mean_x),
            variance_change=float(trace.variance_x[-1] / trace.variance_x[0] - 1.0),
            group_velocity=point.group_velocity,
            diffraction=point.diffraction,
        )
    return cases


def _quiet_gaussian(model, sigma_en, duration, samples, step):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", analytic.ValidityWarning)
        return run_bloch_oscillation(model, sigma_en, duration, samples, step=step)


@dataclass(frozen=True, eq=False)
class RefractionResult:
    trace: TraceRecord
    slope_before: float
    slope_after: float
    expected_ratio: float

    @property
    def ratio(self):
        return self.slope_before / self.slope_after


def run_refraction(kappa1, phase1, kappa2, phase2, segment_duration=5.0, lattice_constant=1.0,
                   sigma_en=None, samples_per_segment=100, step=None):
    """Two synchronized segments with different hopping; slopes on each side.

    Slopes are fitted over the central 60% of each segment.  The expected
    ratio is ``v_g(phase1) |kappa1| / (v_g(phase2) |kappa2|)`` at ``k = 0``,
    i.e. ``+-|kappa1/kappa2|`` when both phases sit at zero diffraction.
    """
    if kappa1 <= 0 or kappa2 <= 0 or segment_duration <= 0:
        raise DomainError("refraction needs positive hopping and segment duration")
    w_l = lattice_constant
    sigma_en = 4.0 * w_l if sigma_en is None else sigma_en
    model = LatticeModel.create(kappa1, 0.0, w_l, phase1)
    v1 = analytic.band(0.0, 0.0, model).group_velocity
    v2 = analytic.band(0.0, 0.0, model.replace(kappa_mag=kappa2, phase_delay=phase2)).group_velocity
    if abs(v1) < 1e-12 or abs(v2) < 1e-12:
        raise DomainError("refraction segments must have non-zero group velocity")
    schedule = Schedule((Segment(segment_duration, phase1, hopping_magnitude=kappa1),
                         Segment(segment_duration, phase2, hopping_magnitude=kappa2)))
    reach = 2.0 * max(kappa1, kappa2) * 2.0 * segment_duration
    half_width = int(math.ceil(reach + 8.0 * sigma_en / w_l)) + 20
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", analytic.ValidityWarning)
        start = analytic.GaussianEnvelopeSpec(sigma_en).state(w_l, half_width)
    trace = evolve(start, schedule, model, step=step, samples=2 * samples_per_segment + 1)
    mid = samples_per_segment
    first = slope(trace.times[:mid + 1], trace.mean_x[:mid + 1], 0.2, 0.8)
    second = slope(trace.times[mid:], trace.mean_x[mid:], 0.2, 0.8)
    return RefractionResult(trace, first, second, v1 / v2)


# --- lensing -------------------------------------------------------------

@dataclass(frozen=True)
class ModulationStep:
    """Phase-modulation kick of strength ``g`` and phase ``phase``."""

    g: float
    phase: float

    def __post_init__(self):
        if self.g < 0:
            raise DomainError("modulation strength must be non-negative")

    @property
    def vector(self):
        return np.array([self.g * math.cos(self.phase), self.g * math.sin(self.phase)])

    @classmethod
    def from_vector(cls, x, y):
        return cls(math.hypot(x, y), math.atan2(y, x))


@dataclass(frozen=True, eq=False)
class LensingResult:
    final_state: SidebandState
    fidelity: float
    residual: float
    trace: TraceRecord


def fidelity(a, b):
    """``|<a|b>|^2`` for two states on the same window."""
    if a.window != b.window:
        raise DomainError("states live on different windows")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def run_lensing(steps, initial=None, path="kernel", kappa_mag=0.7, lattice_constant=1.0,
                half_width=None, step=None, samples_per_step=20):
    """Apply a sequence of modulation kicks and report the imaging fidelity.

    ``path="kernel"`` applies the Bessel kernels directly.  ``path="tba"``
    realises kick ``(g, phase)`` as a synchronized segment of duration
    ``g / (2 |kappa|)`` at drive phase ``phase``.  The input defaults to a
    single sideband.
    """
    steps = [s if isinstance(s, ModulationStep) else ModulationStep(*s) for s in steps]
    if not steps:
        raise DomainError("need at least one modulation step")
    residual = float(np.linalg.norm(np.sum([s.vector for s in steps], axis=0)))
    if initial is None:
        if half_width is None:
            g_total = sum(s.g for s in steps)
            half_width = int(math.ceil(g_total + 8.0 * g_total ** (1.0 / 3.0))) + 35
        initial = SidebandState.delta(half_width)
    if path == "kernel":
        states = [initial]
        for s in steps:
            states.append(apply_phase_modulation(states[-1], s.g, s.phase))
        trace = TraceRecord.from_amplitudes(np.arange(len(states), dtype=float),
                                            [st.amplitudes for st in states], initial.window,
                                            lattice_constant)
        final = states[-1]
    elif path == "tba":
        if kappa_mag <= 0:
            raise DomainError("the segmented path needs positive hopping")
        model = LatticeModel.create(kappa_mag, 0.0, lattice_constant)
        segments = tuple(Segment(s.g / (2.0 * kappa_mag), s.phase) for s in steps if s.g > 0)
        if not segments:
            final = initial
            trace = TraceRecord.from_amplitudes([0.0, 1.0], [initial.amplitudes] * 2,
                                                initial.window, lattice_constant)
        else:
            trace = evolve(initial, Schedule(segments), model, step=step,
                           samples=samples_per_step * len(segments) + 1)
            final = trace.final_state
    else:
        raise DomainError(f"unknown lensing path {path!r}")
    return LensingResult(final, fidelity(initial, final), residual, trace)


def closed_polygon(rng, sides, g_scale=2.0):
    """Random kicks whose vectors sum to zero."""
    vectors = rng.normal(scale=g_scale, size=(sides - 1, 2))
    vectors = np.vstack([vectors, -vectors.sum(axis=0)])
    return [ModulationStep.from_vector(x, y) for x, y in vectors]


# --- Talbot self-imaging -------------------------------------------------

@dataclass(frozen=True)
class TalbotInput:
    """Comb with weight ``pattern[m mod len(pattern)]`` on sites ``n = m * period_T``."""

    period_T: int
    pattern: tuple

    def __post_init__(self):
        if int(self.period_T) != self.period_T or self.period_T < 1:
            raise DomainError("period_T must be a positive integer")
        pattern = tuple(complex(c) for c in self.pattern)
        if not pattern or not any(abs(c) > 0 for c in pattern):
            raise DomainError("pattern needs at least one non-zero entry")
        object.__setattr__(self, "pattern", pattern)

    @property
    def repeat(self):
        return self.period_T * len(self.pattern)

    def state(self, repeats):
        """Normalized comb on a ring of ``repeats`` full pattern periods."""
        if repeats < 6:
            raise DomainError("the ring must hold at least six pattern periods")
        size = repeats * self.repeat
        lo = -(size // 2)
        n = np.arange(lo, lo + size)
        amps = np.zeros(size, dtype=complex)
        on = n % self.period_T == 0
        m = n[on] // self.period_T
        amps[on] = np.array(self.pattern)[m % len(self.pattern)]
        return SidebandState((lo, lo + size - 1), amps / np.linalg.norm(amps))


@dataclass(frozen=True, eq=False)
class TalbotResult:
    trace: TraceRecord
    correlation: np.ndarray
    revivals: list


def autocorrelation(amplitudes, initial):
    """``C(t) = |<a(0)|a(t)>|^2`` for each row of ``amplitudes``."""
    return np.abs(np.asarray(amplitudes) @ np.conj(initial)) ** 2


def find_revivals(times, values, threshold=0.9):
    """Interior local maxima above ``threshold`` with quadratic refinement.

    Returns a list of ``(time, value)`` pairs.
    """
    times = np.asarray(times)
    values = np.asarray(values)
    dt = times[1] - times[0]
    found = []
    for i in range(1, values.size - 1):
        if values[i] > threshold and values[i] >= values[i - 1] and values[i] > values[i + 1]:
            left, mid, right = values[i - 1], values[i], values[i + 1]
            curv = left - 2.0 * mid + right
            shift = 0.5 * (left - right) / curv if curv != 0 else 0.0
            found.append((float(times[i] + shift * dt), float(mid - 0.25 * (left - right) * shift)))
    return found


def talbot_model(kappa_mag, phase_delay=0.0, lattice_constant=1.0):
    return LatticeModel.create(kappa_mag, 0.0, lattice_constant, phase_delay)


def run_talbot(talbot, model, duration=10.0, samples=1001, repeats=None, step=None,
               threshold=0.9):
    """Evolve a periodic comb on a ring and detect self-imaging revivals."""
    if model.detuning != 0:
        raise DomainError("Talbot runs use a synchronized drive")
    if repeats is None:
        repeats = max(6, int(math.ceil(64 / talbot.repeat)))
    start = talbot.state(repeats)
    trace = evolve(start, Schedule.constant(model, duration), model, step=step, samples=samples,
                   boundary="periodic", keep_amplitudes=True)
    corr = autocorrelation(trace.amplitudes, start.amplitudes)
    return TalbotResult(trace, corr, find_revivals(trace.times, corr, threshold))


def ring_hamiltonian(size, kappa):
    """Dense ring hopping matrix with ``H[n, n+1] = kappa``."""
    h = np.zeros((size, size), dtype=complex)
    idx = np.arange(size)
    h[idx, (idx + 1) % size] += kappa
    h[(idx + 1) % size, idx] += np.conj(kappa)
    return h


def talbot_oracle(initial, model, times):
    """Autocorrelation from dense diagonalization of the ring Hamiltonian."""
    size = initial.amplitudes.size
    if size > 257:
        raise DomainError("dense oracle is limited to 257 sites")
    energies, vectors = np.linalg.eigh(ring_hamiltonian(size, model.hopping_kappa))
    weights = np.abs(vectors.conj().T @ initial.amplitudes) ** 2
    overlap = np.exp(-1j * np.outer(times, energies)) @ weights
    return np.abs(overlap) ** 2


# --- dispatch ------------------------------------------------------------

def run_scenario(spec):
    """Run a :class:`ScenarioSpec` and collect traces plus a summary dict."""
    model, p, samples = spec.model, dict(spec.params), spec.samples
    w_l = model.lattice_constant
    kind = spec.kind
    if kind in ("breathing", "bloch_oscillation"):
        duration = p.get("duration") or _default_duration(model)
        sigma_en = p.get("sigma_en") or 10.0 * w_l
        if kind == "breathing":
            trace = run_breathing(model, duration, samples, step=spec.step)
            summary = {"max_abs_mean_x": float(np.max(np.abs(trace.mean_x)))}
        else:
            trace = run_bloch_oscillation(model, sigma_en, duration, samples, step=spec.step)
            summary = {"peak_mean_x": float(np.max(np.abs(trace.mean_x)))}
        traces = {}
        half = (trace.window[1] - trace.window[0]) // 2
        if spec.solver in ("tba", "all"):
            traces["tba"] = trace
        if spec.solver in ("analytic", "all"):
            traces["analytic"] = analytic_trace(kind, model, trace.times, half, sigma_en)
        if spec.solver in ("tdse", "all"):
            traces["tdse"] = tdse_trace(kind, model, spec.beam, duration, samples, half, sigma_en,
                                        **p.get("grid", {}))
        summary["norm_drift"] = trace.norm_drift
        return ScenarioResult(traces, summary)
    if kind == "detuning_sweep":
        rows = run_detuning_sweep(model.kappa_mag, p["detunings"], p["interaction_time"], w_l,
                                  model.phase_delay, samples, spec.step)
        positive = [r for r in rows if r.detuning != 0]
        summary = {"rows": [r.__dict__ for r in rows]}
        if len(positive) >= 2:
            summary["peak_spread_exponent"] = fit_power_law(
                [abs(r.detuning) for r in positive], [r.peak_spread for r in positive])[0]
        return ScenarioResult({}, summary)
    if kind == "acceleration":
        res = run_acceleration(model, p.get("cycles", 2), p.get("method", "phase"),
                               p.get("sigma_en"), step=spec.step)
        return ScenarioResult({"tba": res.trace}, {
            "half_period_means": res.half_period_means.tolist(),
            "predicted_increment": res.predicted_increment,
            "field_formula_increment": res.field_formula_increment,
            "monotone": res.monotone,
        })
    if kind == "diffraction":
        cases = run_diffraction(model.kappa_mag, w_l, p.get("sigma_en"), p.get("duration", 10.0),
                                tuple(p.get("phase_delays", PHASE_DELAYS)), samples, spec.step)
        traces = {f"phi{i}": c.trace for i, c in enumerate(cases.values())}
        summary = {"cases": [{"phase_delay": c.phase_delay, "drift_rate": c.drift_rate,
                              "variance_change": c.variance_change, "classified": c.classified}
                             for c in cases.values()]}
        return ScenarioResult(traces, summary)
    if kind == "refraction":
        kappa2 = model.kappa_mag * p.get("kappa_ratio", 1.0)
        phase2 = model.phase_delay + p.get("phase_jump", 0.0)
        res = run_refraction(model.kappa_mag, model.phase_delay, kappa2, phase2,
                             p.get("segment_duration", 5.0), w_l, p.get("sigma_en"),
                             max(2, samples // 2), spec.step)
        return ScenarioResult({"tba": res.trace}, {"ratio": res.ratio,
                                                   "expected_ratio": res.expected_ratio})
    if kind == "lensing":
        steps = [ModulationStep(s["g"], s["phase"]) for s in p["steps"]]
        res = run_lensing(steps, path=p.get("path", "kernel"), kappa_mag=model.kappa_mag,
                          lattice_constant=w_l, step=spec.step)
        return ScenarioResult({"tba": res.trace}, {"fidelity": res.fidelity,
                                                   "residual": res.residual})
    talbot = TalbotInput(p["period"], tuple(complex(*c) if isinstance(c, (list, tuple)) else c
                                             for c in p["pattern"]))
    res = run_talbot(talbot, model, p.get("duration", 10.0), samples, p.get("repeats"), spec.step)
    return ScenarioResult({"tba": res.trace}, {"revivals": [list(r) for r in res.revivals]})
