"""Tight-binding evolution of PINEM sideband amplitudes.

The amplitudes obey the coupled-mode equations

    i da_n/dt = -n dw a_n + kappa a_{n+1} + conj(kappa) a_{n-1}

on a truncated window of sidebands.  Drive programs are piecewise constant
(:class:`Schedule`), so a fixed-step classical Runge-Kutta integrator is used
segment by segment.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv

from .errors import DomainError, WindowOverflowError
from .params import hopping

EDGE_TOLERANCE = 1e-8
KERNEL_TAIL_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class SidebandState:
    """Complex amplitudes ``a_n`` for ``n`` in ``window = (n_min, n_max)``."""

    window: tuple
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        n_min, n_max = (int(v) for v in self.window)
        if not n_min <= 0 <= n_max:
            raise DomainError(f"window {self.window} must contain n = 0")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (n_max - n_min + 1,):
            raise DomainError("amplitude count does not match the window")
        object.__setattr__(self, "window", (n_min, n_max))
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def delta(cls, half_width, site=0):
        """Single occupied sideband on the window ``[-half_width, half_width]``."""
        amps = np.zeros(2 * half_width + 1, dtype=complex)
        amps[site + half_width] = 1.0
        return cls((-half_width, half_width), amps)

    @classmethod
    def gaussian(cls, sigma_en, lattice_constant, half_width, center=0.0):
        """Gaussian envelope a_n ~ exp(-(n w_L)^2 / (4 sigma_en^2)), normalized on the window."""
        n = np.arange(-half_width, half_width + 1)
        amps = np.exp(-((n - center) * lattice_constant) ** 2 / (4.0 * sigma_en**2))
        amps = amps / np.linalg.norm(amps)
        return cls((-half_width, half_width), amps.astype(complex))

    @property
    def indices(self):
        return np.arange(self.window[0], self.window[1] + 1)

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self):
        return float(np.sum(self.probabilities))

    def amplitude(self, n):
        n_min, n_max = self.window
        return self.amplitudes[n - n_min] if n_min <= n <= n_max else 0j

    def with_amplitudes(self, amplitudes, time=None):
        return SidebandState(self.window, amplitudes, self.time if time is None else time)

    def padded(self, half_width):
        """Same state on the wider symmetric window ``[-half_width, half_width]``."""
        n_min, n_max = self.window
        if half_width < max(-n_min, n_max):
            raise DomainError("padding cannot shrink the window")
        amps = np.zeros(2 * half_width + 1, dtype=complex)
        amps[n_min + half_width:n_max + half_width + 1] = self.amplitudes
        return SidebandState((-half_width, half_width), amps, self.time)


@dataclass(frozen=True)
class Segment:
    """One piece of a drive program.

    ``hopping_magnitude=None`` keeps the lattice model's ``|kappa|``; the
    segment detuning is ``detuning_sign * model.detuning``.
    """

    duration: float
    phase_delay: float
    detuning_sign: int = 1
    hopping_magnitude: float = None

    def __post_init__(self):
        if not self.duration > 0:
            raise DomainError("segment durations must be positive")
        if self.detuning_sign not in (1, -1):
            raise DomainError("detuning_sign must be +1 or -1")
        if self.hopping_magnitude is not None and self.hopping_magnitude < 0:
            raise DomainError("hopping magnitude must be non-negative")

    def coefficients(self, model):
        mag = model.kappa_mag if self.hopping_magnitude is None else self.hopping_magnitude
        return hopping(mag, self.phase_delay), self.detuning_sign * model.detuning


@dataclass(frozen=True)
class Schedule:
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise DomainError("a schedule needs at least one segment")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, model, duration):
        return cls((Segment(duration, model.phase_delay),))

    @property
    def duration(self):
        return sum(s.duration for s in self.segments)

    def boundaries(self):
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])


@dataclass(frozen=True, eq=False)
class TraceRecord:
    """Sampled history of a run.

    ``spectra[k, j]`` is ``|a_n|^2`` at ``times[k]`` for ``n = window[0] + j``.
    """

    times: np.ndarray
    spectra: np.ndarray
    mean_x: np.ndarray
    variance_x: np.ndarray
    amplitudes_final: np.ndarray
    window: tuple
    lattice_constant: float
    norms: np.ndarray = None
    amplitudes: np.ndarray = None
    info: dict = field(default_factory=dict)

    @property
    def indices(self):
        return np.arange(self.window[0], self.window[1] + 1)

    @property
    def final_state(self):
        return SidebandState(self.window, self.amplitudes_final, float(self.times[-1]))

    @property
    def norm_drift(self):
        return float(np.max(np.abs(self.norms - 1.0))) if self.norms is not None else 0.0

    @classmethod
    def from_amplitudes(cls, times, amplitudes, window, lattice_constant, keep_amplitudes=True, **info):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        probs = np.abs(amplitudes) ** 2
        norms = probs.sum(axis=1)
        n = np.arange(window[0], window[1] + 1)
        mean_n = probs @ n / norms
        var_n = probs @ (n * n) / norms - mean_n**2
        return cls(
            times=np.asarray(times, dtype=float),
            spectra=probs,
            mean_x=lattice_constant * mean_n,
            variance_x=lattice_constant**2 * var_n,
            amplitudes_final=amplitudes[-1].copy(),
            window=tuple(window),
            lattice_constant=lattice_constant,
            norms=norms,
            amplitudes=amplitudes if keep_amplitudes else None,
            info=dict(info),
        )


def derivative(state, model, kappa=None, detuning=None, periodic=False):
    """Right-hand side da_n/dt of the coupled-mode equations.

    Neighbours outside the window count as empty unless ``periodic`` wraps
    the window into a ring.
    """
    kappa = model.hopping_kappa if kappa is None else kappa
    detuning = model.detuning if detuning is None else detuning
    return _rate(state.amplitudes, state.indices, kappa, detuning, periodic)


def _rate(a, n, kappa, detuning, periodic):
    return _rate_from(a, 1j * detuning * n, -1j * kappa, -1j * np.conj(kappa), periodic)


def _rate_from(a, onsite, up, down, periodic):
    rate = onsite * a
    if periodic:
        rate += up * np.roll(a, -1) + down * np.roll(a, 1)
    else:
        rate[:-1] += up * a[1:]
        rate[1:] += down * a[:-1]
    return rate


def _rk4(a, n, kappa, detuning, h, steps, periodic):
    onsite = 1j * detuning * n
    up, down = -1j * kappa, -1j * np.conj(kappa)
    for _ in range(steps):
        k1 = _rate_from(a, onsite, up, down, periodic)
        k2 = _rate_from(a + 0.5 * h * k1, onsite, up, down, periodic)
        k3 = _rate_from(a + 0.5 * h * k2, onsite, up, down, periodic)
        k4 = _rate_from(a + h * k3, onsite, up, down, periodic)
        a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return a


def max_step(model, schedule=None):
    """Largest step allowed for ``model`` driven by ``schedule``."""
    rates = [model.kappa_mag, abs(model.detuning)]
    if schedule is not None:
        rates += [abs(s.coefficients(model)[0]) for s in schedule.segments]
    scale = max(rates)
    return 0.01 / scale if scale > 0 else math.inf


def default_step(model, schedule, window):
    """Half the stability bound, further capped at ``0.1 / rho``.

    ``rho = |dw| max|n| + 2 max|kappa|`` bounds the spectral radius of the
    window Hamiltonian, so every mode is advanced with ``h |omega| <= 0.1``.
    """
    coeffs = [s.coefficients(model) for s in schedule.segments]
    rho = (max(abs(d) for _, d in coeffs) * max(abs(window[0]), abs(window[1]))
           + 2.0 * max(abs(k) for k, _ in coeffs))
    step = 0.5 * max_step(model, schedule)
    return min(step, 0.1 / rho) if rho > 0 else step


def default_window(kappa_mag, detuning, t_end, margin=20):
    """Half width N of the window [-N, N] that holds a single-sideband input."""
    if detuning != 0:
        return int(math.ceil(4.0 * kappa_mag / abs(detuning))) + margin
    return int(math.ceil(2.0 * kappa_mag * t_end)) + margin


def _edge_population(probs):
    return max(probs[:2].sum(), probs[-2:].sum())


def evolve(state, schedule, model, step=None, samples=101, boundary="open",
           edge_tolerance=EDGE_TOLERANCE, keep_amplitudes=False):
    """Integrate the coupled-mode equations through ``schedule``.

    Parameters
    ----------
    state : SidebandState
        Initial amplitudes; ``state.time`` is the start time.
    schedule : Schedule
        Piecewise-constant drive program.
    model : LatticeModel
        Supplies the detuning magnitude, default ``|kappa|`` and ``w_L``.
    step : float, optional
        Maximum RK4 step in fs, at most :func:`max_step`.  Defaults to
        :func:`default_step`.
    samples : int
        Number of uniformly spaced output samples, endpoints included.
    boundary : {"open", "periodic"}
        ``"periodic"`` treats the window as a ring (used for spatially
        periodic inputs) and disables the edge guard.

    Returns
    -------
    TraceRecord

    Raises
    ------
    WindowOverflowError
        If more than ``edge_tolerance`` of the population sits on the two
        outermost sites of either edge at any sample.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    if boundary not in ("open", "periodic"):
        raise DomainError(f"unknown boundary {boundary!r}")
    limit = max_step(model, schedule)
    if step is None:
        step = default_step(model, schedule, state.window)
    elif step > limit * (1 + 1e-12):
        raise DomainError(f"step {step} exceeds the stability bound {limit}")
    periodic = boundary == "periodic"

    t0 = state.time
    bounds = t0 + schedule.boundaries()
    times = np.linspace(t0, bounds[-1], samples)
    breaks = np.unique(np.concatenate([times, bounds]))

    n = state.indices
    a = state.amplitudes.copy()
    out = np.empty((samples, a.size), dtype=complex)
    out[0] = a
    sample_idx = 1
    for left, right in zip(breaks[:-1], breaks[1:]):
        width = right - left
        if width > 0:
            seg = min(int(np.searchsorted(bounds, 0.5 * (left + right)) - 1), len(schedule.segments) - 1)
            kappa, detuning = schedule.segments[seg].coefficients(model)
            steps = max(1, int(math.ceil(width / step - 1e-9)))
            a = _rk4(a, n, kappa, detuning, width / steps, steps, periodic)
        while sample_idx < samples and times[sample_idx] <= right + 1e-12 * max(1.0, abs(right)):
            out[sample_idx] = a
            if not periodic and _edge_population(np.abs(a) ** 2) > edge_tolerance:
                raise WindowOverflowError(
                    f"sideband window {state.window} overflowed at t = {times[sample_idx]:.6g} fs",
                    time=float(times[sample_idx]))
            sample_idx += 1
    return TraceRecord.from_amplitudes(times, out, state.window, model.lattice_constant,
                                       keep_amplitudes=keep_amplitudes, boundary=boundary,
                                       step=step)


def observables(state, model):
    """Centroid ``w_L <n>`` and variance ``w_L^2 (<n^2> - <n>^2)`` of a state."""
    p = state.probabilities
    n = state.indices
    mean_n = float(p @ n)
    var_n = float(p @ (n * n)) - mean_n**2
    return model.lattice_constant * mean_n, model.lattice_constant**2 * var_n


def modulation_kernel(g, phase, order):
    """Bessel kernel ``J_j(g) exp(-i j phase)`` for ``j = -order..order``."""
    j = np.arange(-order, order + 1)
    return jv(j, g) * np.exp(-1j * j * phase)


def kernel_order(g):
    """Kernel half width beyond which |J_j(g)| is below double precision."""
    return int(math.ceil(abs(g) + 8.0 * abs(g) ** (1.0 / 3.0) + 30))


def apply_phase_modulation(state, g, phase, tail_tolerance=KERNEL_TAIL_TOLERANCE):
    """Apply the phase-modulation operator ``M(g, phase)`` to a sideband state.

    ``a_n <- sum_m J_{n-m}(g) exp(-i (n-m) phase) a_m``.  For a single
    sideband input this gives ``J_n(g) exp(-i n phase)``, the synchronized
    tight-binding result with ``g = 2|kappa| t`` and ``phase = phi0``.
    """
    if g < 0:
        raise DomainError("coupling g must be non-negative")
    return convolve_into_window(state, modulation_kernel(g, phase, kernel_order(g)), tail_tolerance)


def convolve_into_window(state, kernel, tail_tolerance=KERNEL_TAIL_TOLERANCE):
    """Convolve amplitudes with a centred kernel and crop back to the window.

    Weight pushed outside the window is checked, not discarded silently.
    """
    order = (kernel.size - 1) // 2
    full = np.convolve(state.amplitudes, kernel)
    inside = full[order:order + state.amplitudes.size]
    spill = float(np.sum(np.abs(full) ** 2) - np.sum(np.abs(inside) ** 2))
    if spill > tail_tolerance:
        raise WindowOverflowError(
            f"kernel tail outside window {state.window} carries weight {spill:.3g}",
            time=state.time)
    return state.with_amplitudes(inside.copy())
