"""Real-space Crank-Nicolson solver for the slow electron envelope.

The envelope ``chi(z, tau)`` (``tau = c t``) obeys ``i d chi / d tau = H chi``
with

    H = -alpha2 d^2/dz^2 - i beta d/dz + drive(z, tau),

discretized by second-order central differences on a periodic grid.  The
drive enters through ``theta = k_L tau - q z + phi0`` with strengths
``alpha0`` (on-site) and ``alpha1`` (gradient coupling).  Sideband
populations are recovered by projecting ``chi`` onto the comb
``exp(i n q z)``.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .analytic import GaussianEnvelopeSpec
from .constants import CODATA
from .errors import BoundaryMassError, DomainError
from .params import DriveParams
from .tba import SidebandState, TraceRecord

BOUNDARY_FRACTION = 0.05
BOUNDARY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class TdseConfig:
    """Grid, step and drive coefficients of the real-space model.

    Lengths in um.  ``alpha0`` is in 1/um, ``alpha1`` is dimensionless and
    ``alpha2`` is in um.  Use :meth:`from_physical` or :meth:`from_lattice`
    to obtain the coefficients from beam and drive parameters.
    """

    z_min: float
    z_max: float
    grid_points: int
    step_tau: float
    alpha0: float
    alpha1: float
    alpha2: float
    beta: float
    laser_k: float
    grating_k: float
    phase_delay: float = 0.0
    light_speed: float = CODATA.light_speed

    def __post_init__(self):
        if self.grid_points < 3:
            raise DomainError("need at least three grid points")
        if not self.z_max > self.z_min:
            raise DomainError("z_max must exceed z_min")
        if not self.step_tau > 0:
            raise DomainError("step_tau must be positive")
        periods = self.length * self.grating_k / (2.0 * math.pi)
        if abs(periods - round(periods)) > 1e-9 * max(1.0, periods) or round(periods) < 1:
            raise DomainError("domain must span an integer number of grating periods")

    @classmethod
    def from_physical(cls, beam, drive, periods=32, points_per_period=128, courant=0.5,
                      z_center=0.0, constants=CODATA):
        """Coefficients from beam kinematics and drive settings.

        ``alpha0 = e E0 beta / (hbar w_L)``, ``alpha1 = e E0 / (gamma m c w_L)``
        and ``alpha2 = hbar / (2 gamma^3 m c)``.
        """
        if points_per_period < 3 or periods < 1:
            raise DomainError("grid too coarse")
        omega = drive.laser_angular_frequency
        e, m, c, hbar = (constants.elementary_charge, constants.electron_mass,
                         constants.light_speed, constants.hbar)
        length = periods * drive.grating_period
        n_z = int(periods * points_per_period)
        dz = length / n_z
        return cls(
            z_min=z_center - 0.5 * length,
            z_max=z_center + 0.5 * length,
            grid_points=n_z,
            step_tau=courant * dz / beam.beta,
            alpha0=e * drive.field_strength * beam.beta / (hbar * omega),
            alpha1=e * drive.field_strength / (beam.gamma * m * c * omega),
            alpha2=hbar / (2.0 * beam.gamma**3 * m * c),
            beta=beam.beta,
            laser_k=omega / c,
            grating_k=drive.grating_wavevector,
            phase_delay=drive.phase_delay,
            light_speed=c,
        )

    @classmethod
    def from_lattice(cls, model, beam, periods=32, points_per_period=128, courant=0.5,
                     constants=CODATA):
        """Grid model whose sideband dynamics reproduce ``model``.

        The grating wavevector is ``(w_L - dw) / v`` and the field strength
        is chosen so that ``e E0 v / (2 hbar w_L) = |kappa|``.
        """
        drive = DriveParams.for_lattice(beam, model.lattice_constant, model.detuning,
                                        model.kappa_mag, model.phase_delay, constants=constants)
        return cls.from_physical(beam, drive, periods, points_per_period, courant,
                                 constants=constants)

    @property
    def length(self):
        return self.z_max - self.z_min

    @property
    def dz(self):
        return self.length / self.grid_points

    @property
    def z(self):
        return self.z_min + self.dz * np.arange(self.grid_points)

    @property
    def courant_number(self):
        return self.beta * self.step_tau / self.dz

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    values: np.ndarray
    tau: float = 0.0

    def norm(self, dz):
        return float(np.sum(np.abs(self.values) ** 2) * dz)

    def time(self, config):
        return self.tau / config.light_speed


def hamiltonian_bands(config, tau):
    """Diagonal, upper and lower bands of the Hermitian grid Hamiltonian.

    ``upper[j]`` couples node ``j`` to ``j + 1`` and ``lower[j]`` couples
    ``j`` to ``j - 1`` (both periodic).  The drive terms carry an overall
    minus sign from the negative vector-potential amplitude.  The raw
    discretization is not Hermitian at first order in ``alpha1``; it is
    replaced by ``(H + H^dagger) / 2``.
    """
    dz = config.dz
    theta = config.laser_k * tau - config.grating_k * config.z + config.phase_delay
    a0, a1, a2 = -config.alpha0, -config.alpha1, config.alpha2
    kin = -a2 / dz**2
    drift = 0.5j * config.beta / dz
    upper = kin - drift + (0.5 * a1 / dz) * np.exp(1j * theta)
    lower = kin + drift + (0.5 * a1 / dz) * np.exp(-1j * theta)
    diag = 2.0 * a2 / dz**2 - (a1 / dz) * np.cos(theta) - a0 * np.sin(theta)
    upper = 0.5 * (upper + np.conj(np.roll(lower, -1)))
    lower = np.conj(np.roll(upper, 1))
    return diag.astype(complex), upper, lower


def apply_bands(bands, x):
    diag, upper, lower = bands
    return diag * x + upper * np.roll(x, -1) + lower * np.roll(x, 1)


def build_step_matrices(config, tau):
    """Implicit ``1 + i dtau H / 2`` and explicit ``1 - i dtau H / 2`` at ``tau``.

    Each is returned as a ``(diag, upper, lower)`` triple of periodic bands.

    Raises
    ------
    DomainError
        If ``beta dtau / dz > 1``.
    """
    if config.courant_number > 1.0:
        raise DomainError(f"Courant number {config.courant_number:.3g} exceeds 1; reduce step_tau")
    diag, upper, lower = hamiltonian_bands(config, tau)
    h = 0.5j * config.step_tau
    implicit = (1.0 + h * diag, h * upper, h * lower)
    explicit = (1.0 - h * diag, -h * upper, -h * lower)
    return implicit, explicit


def solve_periodic_tridiagonal(bands, rhs):
    """Solve a cyclic tridiagonal system with a Sherman-Morrison correction."""
    diag, upper, lower = bands
    n = diag.size
    corner_top = lower[0]  # A[0, n-1]
    corner_bottom = upper[-1]  # A[n-1, 0]
    gamma = -diag[0]
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[1, 0] -= gamma
    ab[1, -1] -= corner_bottom * corner_top / gamma
    ab[2, :-1] = lower[1:]
    u = np.zeros(n, dtype=complex)
    u[0] = gamma
    u[-1] = corner_bottom
    sol = solve_banded((1, 1), ab, np.column_stack([rhs, u]), check_finite=False)
    y, q = sol[:, 0], sol[:, 1]
    v_y = y[0] + corner_top / gamma * y[-1]
    v_q = q[0] + corner_top / gamma * q[-1]
    return y - (v_y / (1.0 + v_q)) * q


def cn_step(psi, config):
    """Advance one Crank-Nicolson step with ``H`` taken at the step midpoint."""
    implicit, explicit = build_step_matrices(config, psi.tau + 0.5 * config.step_tau)
    rhs = apply_bands(explicit, psi.values)
    return GridWavefunction(solve_periodic_tridiagonal(implicit, rhs), psi.tau + config.step_tau)


def boundary_mass(values, dz, fraction=BOUNDARY_FRACTION):
    """Probability in the outer ``fraction`` of the grid on each side (summed)."""
    edge = max(1, int(math.ceil(fraction * values.size)))
    p = np.abs(values) ** 2 * dz
    return float(p[:edge].sum() + p[-edge:].sum()) / float(p.sum())


def extract_sidebands(psi, config, n_range, periodic=False, tolerance=BOUNDARY_TOLERANCE):
    """Project the envelope onto the sideband comb.

    ``a_n ~ sum_j chi_j exp(-i n q z_j) dz * exp(i n k_L tau)``, normalized
    over ``n_range``.  The last factor removes the free phase ``n w_L t``.

    Raises
    ------
    BoundaryMassError
        If more than ``tolerance`` of the probability sits in the outer 5%
        of the grid and ``periodic`` is false.
    """
    if not periodic:
        mass = boundary_mass(psi.values, config.dz)
        if mass > tolerance:
            raise BoundaryMassError(f"boundary mass {mass:.3g} exceeds {tolerance:g}")
    n = np.arange(n_range[0], n_range[1] + 1)
    phases = np.exp(-1j * config.grating_k * np.outer(n, config.z))
    amps = (phases @ psi.values) * config.dz * np.exp(1j * n * config.laser_k * psi.tau)
    total = np.linalg.norm(amps)
    if total == 0:
        raise DomainError("wavefunction has no weight on the requested sidebands")
    return SidebandState(tuple(n_range), amps / total, psi.time(config))


def envelope_std(config, spec=None):
    """Real-space std of ``|chi|^2`` implied by the single-sideband width."""
    if spec is not None and spec.sigma_band is not None:
        return config.beta * config.light_speed / (2.0 * spec.sigma_band)
    return config.length / 16.0


def make_initial_wavepacket(config, source=None, std=None, center=None,
                            tolerance=BOUNDARY_TOLERANCE):
    """Gaussian envelope times a sideband comb.

    Parameters
    ----------
    config : TdseConfig
    source : None, GaussianEnvelopeSpec or SidebandState
        ``None`` gives a bare envelope (only ``n = 0``).  A
        :class:`GaussianEnvelopeSpec` gives comb weights
        ``exp(-(n w_L)^2 / (4 sigma_en^2))``; a :class:`SidebandState` uses
        its amplitudes directly.
    std : float, optional
        Std of ``|chi|^2`` in um.  Defaults to :func:`envelope_std`.
    center : float, optional
        Envelope centre, default mid-domain.

    Raises
    ------
    BoundaryMassError
        If the envelope does not fit inside the domain.
    """
    z = config.z
    spec = source if isinstance(source, GaussianEnvelopeSpec) else None
    if std is None:
        std = envelope_std(config, spec)
    if center is None:
        center = 0.5 * (config.z_min + config.z_max)
    envelope = np.exp(-((z - center) ** 2) / (4.0 * std**2))
    if isinstance(source, SidebandState):
        comb = source.amplitudes @ np.exp(1j * config.grating_k * np.outer(source.indices, z))
    elif spec is not None:
        w_l = config.laser_k * config.light_speed
        half = int(math.ceil(8.0 * spec.sigma_en / w_l))
        n = np.arange(-half, half + 1)
        weights = np.exp(-((n * w_l) ** 2) / (4.0 * spec.sigma_en**2))
        comb = weights @ np.exp(1j * config.grating_k * np.outer(n, z))
    else:
        comb = np.ones_like(z, dtype=complex)
    values = envelope * comb
    mass = boundary_mass(values, config.dz)
    if mass > tolerance:
        raise BoundaryMassError(f"envelope too wide for the domain (edge mass {mass:.3g})")
    values = values / math.sqrt(np.sum(np.abs(values) ** 2) * config.dz)
    return GridWavefunction(values.astype(complex), 0.0)


def sideband_overlap(sigma_e, spacing):
    """|<g_0|g_1>|^2 for Gaussian sidebands of energy std ``sigma_e`` a ``spacing`` apart."""
    return math.exp(-(spacing**2) / (4.0 * sigma_e**2))


def propagate(psi, config, duration, samples=101, n_range=(-10, 10), periodic=False):
    """Run the grid solver and record extracted sideband populations.

    The step is shrunk so that an integer number of steps separates samples.
    ``duration`` is in fs.  The returned trace carries the largest per-step
    norm change in ``info["max_step_norm_drift"]``.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    interval = duration * config.light_speed / (samples - 1)
    steps = max(1, int(math.ceil(interval / config.step_tau - 1e-9)))
    cfg = config.replace(step_tau=interval / steps)
    dz = cfg.dz
    times = psi.tau / cfg.light_speed + np.linspace(0.0, duration, samples)
    amps = [extract_sidebands(psi, cfg, n_range, periodic).amplitudes]
    norms = [psi.norm(dz)]
    worst = 0.0
    current = norms[0]
    for _ in range(samples - 1):
        for _ in range(steps):
            psi = cn_step(psi, cfg)
            updated = psi.norm(dz)
            worst = max(worst, abs(updated - current))
            current = updated
        amps.append(extract_sidebands(psi, cfg, n_range, periodic).amplitudes)
        norms.append(current)
    trace = TraceRecord.from_amplitudes(times, amps, tuple(n_range), cfg.laser_k * cfg.light_speed,
                                        max_step_norm_drift=worst, grid_norm_drift=abs(norms[-1] - norms[0]),
                                        step_tau=cfg.step_tau)
    return trace, psi
