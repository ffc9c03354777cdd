"""Physical constants in the package unit system.

Lengths are in micrometres, times in femtoseconds, energies in electron-volts
and angles in radians.  Angular frequencies are therefore rad/fs, and an
electric field in V/um multiplied by the elementary charge (1 in these units)
gives a force in eV/um.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Electron mass, charge, light speed and reduced Planck constant.

    Attributes
    ----------
    electron_mass : float
        Rest mass in eV fs^2 / um^2.
    elementary_charge : float
        Charge in units of e (energy in eV per volt of potential).
    light_speed : float
        Speed of light in um/fs.
    hbar : float
        Reduced Planck constant in eV fs.
    """

    electron_mass: float
    elementary_charge: float
    light_speed: float
    hbar: float

    def __post_init__(self):
        for name in ("electron_mass", "elementary_charge", "light_speed", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def rest_energy(self):
        """m c^2 in eV."""
        return self.electron_mass * self.light_speed**2


LIGHT_SPEED = 0.299792458  # um/fs, exact
REST_ENERGY_EV = 510998.950690  # CODATA 2022
HBAR_EV_FS = 0.658211956951  # CODATA 2022

CODATA = PhysicalConstants(
    electron_mass=REST_ENERGY_EV / LIGHT_SPEED**2,
    elementary_charge=1.0,
    light_speed=LIGHT_SPEED,
    hbar=HBAR_EV_FS,
)
