"""Closed-form sideband dynamics and synthetic-band quantities.

These are the exact or asymptotic solutions of the coupled-mode equations
and serve as oracles for the numerical solvers.  All phases follow the
convention of :mod:`pinem_lattice.params`.  The band angle defaults to the
``"minus"`` convention

    theta = k w_L - phi0 - dw t,

while ``"plus"`` selects ``theta = k w_L + phi0 + dw t``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .errors import DomainError, WindowOverflowError
from .tba import KERNEL_TAIL_TOLERANCE, SidebandState, convolve_into_window, kernel_order

CONVENTIONS = ("minus", "plus")


class ValidityWarning(UserWarning):
    """A closed form is used outside its regime of validity."""


def _require_detuned(model):
    if model.detuning == 0:
        raise DomainError("closed form needs a non-zero detuning; use pinem_limit instead")


def breathing_argument(t, model):
    """Bessel argument G(t) = (4|kappa|/dw) sin(dw t / 2)."""
    _require_detuned(model)
    dw = model.detuning
    return 4.0 * model.kappa_mag / dw * np.sin(0.5 * dw * np.asarray(t, dtype=float))


def breathing_amplitude(n, t, model):
    """Amplitude of sideband ``n`` at time ``t`` for a single-sideband input.

    ``J_n(G) exp(-i n (phi0 - dw t / 2))`` with ``G`` from
    :func:`breathing_argument`.  Broadcasts over ``n`` and ``t``.
    """
    n = np.asarray(n)
    t = np.asarray(t, dtype=float)
    phase = model.phase_delay - 0.5 * model.detuning * t
    return jv(n, breathing_argument(t, model)) * np.exp(-1j * n * phase)


def pinem_limit(n, t, kappa_mag, phase):
    """Synchronized single-sideband result ``J_n(2|kappa| t) exp(-i n phase)``."""
    n = np.asarray(n)
    return jv(n, 2.0 * kappa_mag * np.asarray(t, dtype=float)) * np.exp(-1j * n * phase)


def propagation_kernel(t, model, order=None):
    """Kernel ``K_j`` with ``a_n(t) = sum_m K_{n-m} a_m(0) exp(i m dw t)``."""
    G = float(breathing_argument(t, model))
    if order is None:
        order = kernel_order(G)
    j = np.arange(-order, order + 1)
    return jv(j, G) * np.exp(-1j * j * (model.phase_delay - 0.5 * model.detuning * t))


def closed_form_propagate(initial, t, model, method="kernel",
                          tail_tolerance=KERNEL_TAIL_TOLERANCE):
    """Exact tight-binding propagation of an arbitrary input to time ``t``.

    Parameters
    ----------
    initial : SidebandState
        Amplitudes at ``initial.time``; ``t`` is measured from there.
    t : float
        Elapsed time in fs.
    model : LatticeModel
        Must be detuned.
    method : {"kernel", "spectral"}
        ``"kernel"`` convolves with the Bessel kernel directly.
        ``"spectral"`` multiplies in synthetic-wavevector space by
        ``exp(i G sin(k - phi0 + dw t / 2))`` on a padded FFT grid.

    Returns
    -------
    SidebandState
        On the same window, tagged with ``initial.time + t``.
    """
    _require_detuned(model)
    dw = model.detuning
    shifted = initial.with_amplitudes(initial.amplitudes * np.exp(1j * initial.indices * dw * t),
                                      initial.time + t)
    if method == "kernel":
        return convolve_into_window(shifted, propagation_kernel(t, model), tail_tolerance)
    if method == "spectral":
        return _spectral_propagate(shifted, t, model, tail_tolerance)
    raise DomainError(f"unknown method {method!r}")


def _spectral_propagate(shifted, t, model, tail_tolerance):
    G = float(breathing_argument(t, model))
    n = shifted.indices
    size = 1 << int(math.ceil(math.log2(n.size + 2 * kernel_order(G) + 1)))
    padded = np.zeros(size, dtype=complex)
    padded[n % size] = shifted.amplitudes
    # u(k) = sum_n a_n exp(i n k) on k_j = 2 pi j / size
    u = size * np.fft.ifft(padded)
    k = 2.0 * np.pi * np.arange(size) / size
    u *= np.exp(1j * G * np.sin(k - model.phase_delay + 0.5 * model.detuning * t))
    full = np.fft.fft(u) / size
    inside = full[n % size]
    spill = float(np.sum(np.abs(full) ** 2) - np.sum(np.abs(inside) ** 2))
    if spill > tail_tolerance:
        raise WindowOverflowError(
            f"spectral propagation leaks weight {spill:.3g} outside {shifted.window}",
            time=shifted.time)
    return shifted.with_amplitudes(inside)


@dataclass(frozen=True)
class BandPoint:
    k_tilde: float
    omega_tilde: float
    group_velocity: float
    diffraction: float


def band_angle(k_tilde, t, model, convention="minus"):
    """Band phase theta for the chosen sign convention."""
    if convention == "minus":
        return k_tilde * model.lattice_constant - model.phase_delay - model.detuning * t
    if convention == "plus":
        return k_tilde * model.lattice_constant + model.phase_delay + model.detuning * t
    raise DomainError(f"unknown convention {convention!r}, expected one of {CONVENTIONS}")


def band(k_tilde, t, model, convention="minus"):
    """Synthetic band energy, group velocity and diffraction at ``k_tilde``.

    ``w = -2|kappa| sin(theta)``, ``v_g = dw/dk``, ``D = d^2w/dk^2``.
    """
    w_l = model.lattice_constant
    if abs(k_tilde) * w_l > math.pi * (1 + 1e-12):
        raise DomainError("k_tilde outside the first Brillouin zone")
    theta = band_angle(k_tilde, t, model, convention)
    two_k = 2.0 * model.kappa_mag
    return BandPoint(
        k_tilde=k_tilde,
        omega_tilde=-two_k * math.sin(theta),
        group_velocity=-two_k * w_l * math.cos(theta),
        diffraction=two_k * w_l**2 * math.sin(theta),
    )


def displacement(t, k_tilde, model, convention="minus"):
    """Energy shift accumulated by integrating the group velocity from 0 to ``t``.

    The band angle advances at ``+dw`` in the ``"plus"`` convention and at
    ``-dw`` in the default ``"minus"`` convention.  At ``k_tilde = 0`` both give
    ``(2|kappa| w_L / dw) [sin(phi0) - sin(phi0 + dw t)]``, which is the
    negative of the sideband centroid shift.
    """
    _require_detuned(model)
    rate = model.detuning if convention == "plus" else -model.detuning
    theta0 = band_angle(k_tilde, 0.0, model, convention)
    theta = band_angle(k_tilde, t, model, convention)
    return -2.0 * model.kappa_mag * model.lattice_constant * (math.sin(theta) - math.sin(theta0)) / rate


@dataclass(frozen=True)
class GaussianEnvelopeSpec:
    """Gaussian sideband envelope ``a_n ~ exp(-(n w_L)^2 / (4 sigma_en^2))``.

    ``sigma_band`` is the energy width of each single sideband expressed as
    an angular frequency; only the real-space solver uses it.
    """

    sigma_en: float
    sigma_band: float = None

    def __post_init__(self):
        if not self.sigma_en > 0:
            raise DomainError("sigma_en must be positive")
        if self.sigma_band is not None and not self.sigma_band > 0:
            raise DomainError("sigma_band must be positive")

    def width_in_sites(self, lattice_constant):
        return self.sigma_en / lattice_constant

    def check_validity(self, lattice_constant, minimum=5.0):
        """Warn when the envelope is too narrow for the oscillation closed form."""
        if self.sigma_en < minimum * lattice_constant:
            warnings.warn(f"sigma_en = {self.sigma_en:g} is below {minimum:g} w_L; "
                          "the Gaussian closed form is only asymptotic", ValidityWarning, stacklevel=3)
            return False
        return True

    def state(self, lattice_constant, half_width=None):
        s = self.width_in_sites(lattice_constant)
        if half_width is None:
            half_width = int(math.ceil(12.0 * s)) + 5
        return SidebandState.gaussian(self.sigma_en, lattice_constant, half_width)


def oscillation_offset(t, model):
    """d(t) = sin(dw t / 2) cos(phi0 + dw t / 2)."""
    x = 0.5 * model.detuning * np.asarray(t, dtype=float)
    return np.sin(x) * np.cos(model.phase_delay + x)


def oscillation_phase(t, model):
    """Phi(t) = -sin(dw t / 2) sin(phi0 + dw t / 2)."""
    x = 0.5 * model.detuning * np.asarray(t, dtype=float)
    return -np.sin(x) * np.sin(model.phase_delay + x)


def gaussian_bo(spec, t, model, half_width=None):
    """Bloch oscillation of a Gaussian envelope in the wide-envelope limit.

    Parameters
    ----------
    spec : GaussianEnvelopeSpec
    t : float
        Time in fs.
    model : LatticeModel
        Must be detuned.
    half_width : int, optional
        Window half width of the returned state.

    Returns
    -------
    state : SidebandState
        ``a_n = N exp(-(n - D)^2 / (4 s^2) + i n dw t + i (4|kappa|/dw) Phi)``
        with ``s = sigma_en / w_L`` and ``D = (4|kappa|/dw) d(t)``.
    mean_x : float
        ``w_L D``.
    variance_x : float
        ``sigma_en^2``, independent of time.
    """
    _require_detuned(model)
    spec.check_validity(model.lattice_constant)
    s = spec.width_in_sites(model.lattice_constant)
    ratio = 4.0 * model.kappa_mag / model.detuning
    D = ratio * float(oscillation_offset(t, model))
    if half_width is None:
        half_width = int(math.ceil(abs(ratio) + 12.0 * s)) + 5
    n = np.arange(-half_width, half_width + 1)
    norm = (2.0 * math.pi * s * s) ** -0.25
    amps = norm * np.exp(-((n - D) ** 2) / (4.0 * s * s)
                         + 1j * n * model.detuning * t
                         + 1j * ratio * float(oscillation_phase(t, model)))
    state = SidebandState((-half_width, half_width), amps, t)
    return state, model.lattice_constant * D, spec.sigma_en**2


@dataclass(frozen=True, eq=False)
class WannierStarkLadder:
    """Projection of a state onto the Wannier-Stark eigenstates.

    Eigenstate ``m`` has amplitudes ``J_{n-m}(x) exp(-i n arg(kappa))`` with
    ``x = 2|kappa|/dw`` and frequency ``-m dw``.
    """

    window: tuple
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    bessel_argument: float
    hopping_phase: float
    detuning: float

    @property
    def indices(self):
        return np.arange(self.window[0], self.window[1] + 1)

    def eigenvector(self, m):
        n = self.indices
        return jv(n - m, self.bessel_argument) * np.exp(-1j * n * self.hopping_phase)

    def reconstruct(self, t):
        """Amplitudes ``a_n(t) = sum_m c_m exp(i m dw t) J_{n-m}(x) exp(-i n arg kappa)``."""
        n = self.indices
        basis = jv(n[:, None] - n[None, :], self.bessel_argument)
        weights = self.coefficients * np.exp(1j * n * self.detuning * t)
        amps = np.exp(-1j * n * self.hopping_phase) * (basis @ weights)
        return SidebandState(self.window, amps, t)


def wannier_stark(initial, model, tolerance=1e-10):
    """Wannier-Stark ladder and expansion coefficients of ``initial``.

    ``c_m = sum_n a_n(0) J_{n-m}(2|kappa|/dw) exp(i n arg(kappa))`` for ``m``
    on the input window.

    Raises
    ------
    WindowOverflowError
        If the coefficients on the window miss more than ``tolerance`` of
        the input norm.
    """
    _require_detuned(model)
    x = 2.0 * model.kappa_mag / model.detuning
    arg = float(np.angle(model.hopping_kappa))
    n = initial.indices
    basis = jv(n[:, None] - n[None, :], x)  # [n, m] -> J_{n-m}
    coeffs = (initial.amplitudes * np.exp(1j * n * arg)) @ basis
    missing = initial.norm - float(np.sum(np.abs(coeffs) ** 2))
    if missing > tolerance:
        raise WindowOverflowError(
            f"window {initial.window} too narrow for Bessel argument {x:.3g}")
    return WannierStarkLadder(initial.window, -n * model.detuning, coeffs, x, arg,
                              model.detuning)
