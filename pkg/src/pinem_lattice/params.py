"""Beam kinematics, drive parameters and the derived synthetic-lattice model.

Hopping-phase convention
------------------------
The near-field vector potential is ``A = A0 sin(w_L t - q z + phi0)`` with
``A0 = -E0 / w_L``.  Inserting the negative amplitude into the hopping
``kappa = e k0 A0 / (2 gamma m) * exp(i (phi0 + pi/2))`` gives

    kappa = |kappa| * exp(i (phi0 - pi/2)),

which is the phase used throughout this package.  With it, a single
sideband evolves into ``J_n(2|kappa| t) exp(-i n phi0)`` at synchronism, and
the Bessel closed forms in :mod:`pinem_lattice.analytic` hold as written.
"""

import cmath
import math
from dataclasses import dataclass

from .constants import CODATA
from .errors import DomainError


def hopping(kappa_mag, phase_delay):
    """Complex nearest-neighbour hopping for a drive with delay ``phase_delay``."""
    return kappa_mag * cmath.exp(1j * (phase_delay - math.pi / 2))


@dataclass(frozen=True)
class BeamKinematics:
    kinetic_energy: float
    gamma: float
    beta: float
    velocity: float
    wavenumber_k0: float
    momentum_p0: float

    @classmethod
    def from_gamma(cls, gamma, constants=CODATA):
        if gamma < 1:
            raise DomainError("gamma must be >= 1")
        return derive_kinematics((gamma - 1.0) * constants.rest_energy, constants)

    @classmethod
    def from_beta(cls, beta, constants=CODATA):
        if not 0 <= beta < 1:
            raise DomainError("beta must lie in [0, 1)")
        return cls.from_gamma(1.0 / math.sqrt(1.0 - beta * beta), constants)


def derive_kinematics(kinetic_energy, constants=CODATA):
    """Relativistic electron parameters for a kinetic energy in eV.

    >>> round(derive_kinematics(510998.95069).gamma, 9)
    2.0
    """
    if kinetic_energy < 0:
        raise DomainError(f"kinetic energy must be non-negative, got {kinetic_energy}")
    gamma = 1.0 + kinetic_energy / constants.rest_energy
    beta = math.sqrt(1.0 - 1.0 / gamma**2)
    velocity = beta * constants.light_speed
    p0 = gamma * constants.electron_mass * velocity
    return BeamKinematics(
        kinetic_energy=kinetic_energy,
        gamma=gamma,
        beta=beta,
        velocity=velocity,
        wavenumber_k0=p0 / constants.hbar,
        momentum_p0=p0,
    )


@dataclass(frozen=True)
class DriveParams:
    """Laser and grating settings.

    ``laser_angular_frequency`` in rad/fs, ``field_strength`` in V/um,
    ``phase_delay`` in rad, ``grating_period`` and ``interaction_length`` in um.
    """

    laser_angular_frequency: float
    field_strength: float
    phase_delay: float
    grating_period: float
    interaction_length: float = 13.0

    def __post_init__(self):
        if not self.laser_angular_frequency > 0:
            raise DomainError("laser angular frequency must be positive")
        if self.field_strength < 0:
            raise DomainError("field strength must be non-negative")
        if not self.grating_period > 0:
            raise DomainError("grating period must be positive")
        if not self.interaction_length > 0:
            raise DomainError("interaction length must be positive")

    @property
    def grating_wavevector(self):
        return 2.0 * math.pi / self.grating_period

    @property
    def vector_potential_amplitude(self):
        """Magnitude of A0 = -E0 / w_L (V fs / um)."""
        return self.field_strength / self.laser_angular_frequency

    @classmethod
    def for_lattice(cls, beam, laser_angular_frequency, detuning, kappa_mag,
                    phase_delay=0.0, interaction_length=13.0, constants=CODATA):
        """Drive that realises a requested detuning and hopping magnitude."""
        q = (laser_angular_frequency - detuning) / beam.velocity
        if not q > 0:
            raise DomainError("detuning must be smaller than the laser frequency")
        field = (kappa_mag * 2.0 * beam.gamma * constants.electron_mass * laser_angular_frequency
                 / (constants.elementary_charge * beam.wavenumber_k0))
        return cls(laser_angular_frequency, field, phase_delay, 2.0 * math.pi / q,
                   interaction_length)


@dataclass(frozen=True)
class LatticeModel:
    """Tight-binding constants of the sideband lattice.

    ``hopping_kappa`` (1/fs) carries magnitude and phase, ``detuning`` and
    ``lattice_constant`` are in rad/fs, ``bloch_period`` in fs (``inf`` when
    the drive is synchronized).
    """

    hopping_kappa: complex
    detuning: float
    lattice_constant: float
    bloch_period: float

    def __post_init__(self):
        expected = 2.0 * math.pi / abs(self.detuning) if self.detuning != 0 else math.inf
        if not math.isclose(self.bloch_period, expected, rel_tol=1e-12):
            raise ValueError("bloch_period inconsistent with detuning")

    @classmethod
    def create(cls, kappa_mag, detuning, lattice_constant=1.0, phase_delay=0.0):
        period = 2.0 * math.pi / abs(detuning) if detuning != 0 else math.inf
        return cls(hopping(kappa_mag, phase_delay), float(detuning),
                   float(lattice_constant), period)

    @property
    def kappa_mag(self):
        return abs(self.hopping_kappa)

    @property
    def phase_delay(self):
        """Drive delay phi0 in [0, 2 pi) implied by the hopping phase."""
        return (cmath.phase(self.hopping_kappa) + math.pi / 2) % (2.0 * math.pi)

    @property
    def synchronized(self):
        return self.detuning == 0

    def replace(self, kappa_mag=None, detuning=None, phase_delay=None):
        return LatticeModel.create(
            self.kappa_mag if kappa_mag is None else kappa_mag,
            self.detuning if detuning is None else detuning,
            self.lattice_constant,
            self.phase_delay if phase_delay is None else phase_delay,
        )


def derive_lattice(beam, drive, constants=CODATA):
    """Lattice constants for an electron beam crossing a driven grating.

    The detuning keeps only ``w_L - v0 q``; the sideband-dependent recoil
    correction is available separately from :func:`recoil_detuning`.
    """
    omega = drive.laser_angular_frequency
    if omega == 0:
        raise DomainError("laser angular frequency must be non-zero")
    detuning = omega - beam.velocity * drive.grating_wavevector
    kappa_mag = (constants.elementary_charge * beam.wavenumber_k0 * drive.field_strength / omega
                 / (2.0 * beam.gamma * constants.electron_mass))
    return LatticeModel.create(kappa_mag, detuning, omega, drive.phase_delay)


def recoil_detuning(beam, drive, n, constants=CODATA):
    """Sideband-dependent correction n hbar q^2 / (2 gamma^3 m) dropped from the detuning."""
    q = drive.grating_wavevector
    return n * constants.hbar * q * q / (2.0 * beam.gamma**3 * constants.electron_mass)


def synchronized_frequency(beam, grating_period):
    """Laser frequency v0 q at which the detuning vanishes (rad/fs)."""
    return beam.velocity * 2.0 * math.pi / grating_period
