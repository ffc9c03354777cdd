import math

import numpy as np
import pytest

from pinem_lattice.constants import CODATA, PhysicalConstants
from pinem_lattice.errors import DomainError
from pinem_lattice.params import (BeamKinematics, DriveParams, LatticeModel, derive_kinematics,
                                  derive_lattice, hopping, recoil_detuning, synchronized_frequency)

# scipy.constants (SI) evaluations, frozen
GAMMA_200KEV = 1.3913902361820012
BETA_200KEV = 0.6953144709798578
KAPPA_BETA07_E7E7 = 4.728343475717605  # 1/fs, e E0 v / (2 hbar w_L) in SI


def test_constants_positive():
    with pytest.raises(ValueError):
        PhysicalConstants(0.0, 1.0, 1.0, 1.0)
    assert CODATA.rest_energy == pytest.approx(510998.95069, rel=1e-12)


def test_kinematics_200kev():
    beam = derive_kinematics(200e3)
    assert beam.gamma == pytest.approx(GAMMA_200KEV, rel=1e-9)
    assert beam.beta == pytest.approx(BETA_200KEV, rel=1e-9)
    # rounded values quoted for the experiment
    assert round(beam.gamma, 1) == 1.4
    assert round(beam.beta, 1) == 0.7


def test_kinematics_rest_frame():
    beam = derive_kinematics(0.0)
    assert beam.gamma == 1.0
    assert beam.beta == 0.0
    assert beam.wavenumber_k0 == 0.0


def test_kinematics_rest_energy():
    beam = derive_kinematics(CODATA.rest_energy)
    assert beam.gamma == pytest.approx(2.0, rel=1e-14)
    assert beam.beta == pytest.approx(math.sqrt(3) / 2, rel=1e-14)


def test_kinematics_invariants():
    beam = derive_kinematics(123456.0)
    assert beam.gamma == pytest.approx(1 / math.sqrt(1 - beam.beta**2), rel=1e-12)
    assert beam.momentum_p0 == pytest.approx(beam.gamma * CODATA.electron_mass * beam.velocity, rel=1e-14)
    assert beam.wavenumber_k0 == pytest.approx(beam.momentum_p0 / CODATA.hbar, rel=1e-14)
    assert beam.kinetic_energy == 123456.0


def test_kinematics_negative_energy():
    with pytest.raises(DomainError):
        derive_kinematics(-1.0)


def test_from_beta_round_trip():
    beam = BeamKinematics.from_beta(0.7)
    assert beam.beta == pytest.approx(0.7, rel=1e-12)
    with pytest.raises(DomainError):
        BeamKinematics.from_beta(1.0)


def test_drive_validation():
    drive = DriveParams(2.36, 10.0, 0.0, 1.14)
    assert drive.grating_wavevector == pytest.approx(2 * math.pi / 1.14)
    assert drive.vector_potential_amplitude == pytest.approx(10.0 / 2.36)
    for bad in [dict(laser_angular_frequency=0.0), dict(field_strength=-1.0),
                dict(grating_period=0.0), dict(interaction_length=0.0)]:
        kw = dict(laser_angular_frequency=2.36, field_strength=10.0, phase_delay=0.0,
                  grating_period=1.14)
        kw.update(bad)
        with pytest.raises(DomainError):
            DriveParams(**kw)


def test_lattice_bloch_period():
    model = LatticeModel.create(0.7, 1.0)
    assert model.bloch_period == pytest.approx(2 * math.pi)
    assert round(model.bloch_period, 1) == 6.3
    assert LatticeModel.create(0.7, 0.0).bloch_period == math.inf
    with pytest.raises(ValueError):
        LatticeModel(0.7 + 0j, 1.0, 1.0, 5.0)


def test_hopping_phase_round_trip():
    for phi in np.linspace(0, 2 * math.pi, 7, endpoint=False):
        model = LatticeModel.create(0.7, 1.0, 1.0, phi)
        assert np.angle(model.hopping_kappa) == pytest.approx(
            math.remainder(phi - math.pi / 2, 2 * math.pi), abs=1e-12)
        assert model.phase_delay == pytest.approx(phi, abs=1e-12)
    assert hopping(0.7, math.pi / 2) == pytest.approx(0.7)


def test_derive_lattice_zero_field():
    beam = derive_kinematics(200e3)
    model = derive_lattice(beam, DriveParams(2.0, 0.0, 0.0, 1.0))
    assert model.kappa_mag == 0.0


def test_derive_lattice_synchronized():
    beam = derive_kinematics(200e3)
    omega = 1.8
    period = 2 * math.pi * beam.velocity / omega
    model = derive_lattice(beam, DriveParams(omega, 5.0, 0.3, period))
    assert model.detuning == pytest.approx(0.0, abs=1e-14)
    assert model.synchronized or abs(model.detuning) < 1e-14
    assert synchronized_frequency(beam, period) == pytest.approx(omega, rel=1e-14)


def test_kappa_reference_point():
    beam = BeamKinematics.from_beta(0.7)
    model = derive_lattice(beam, DriveParams(2.36, 70.0, 0.0, 1.14))
    assert model.kappa_mag == pytest.approx(KAPPA_BETA07_E7E7, rel=1e-9)
    # reported against the quoted 0.7 1/fs
    assert model.kappa_mag / 0.7 == pytest.approx(6.7548, rel=1e-4)


def test_kappa_linear_in_field():
    beam = derive_kinematics(200e3)
    kappas = [derive_lattice(beam, DriveParams(2.0, e0, 0.0, 1.0)).kappa_mag for e0 in (1.0, 3.0, 7.5)]
    assert kappas[1] / kappas[0] == pytest.approx(3.0, rel=1e-12)
    assert kappas[2] / kappas[0] == pytest.approx(7.5, rel=1e-12)


def test_detuning_antisymmetric_about_sync():
    beam = derive_kinematics(200e3)
    period = 1.14
    w0 = synchronized_frequency(beam, period)
    for delta in (0.01, 0.2):
        up = derive_lattice(beam, DriveParams(w0 + delta, 1.0, 0.0, period)).detuning
        down = derive_lattice(beam, DriveParams(w0 - delta, 1.0, 0.0, period)).detuning
        assert up == pytest.approx(delta, rel=1e-12)
        assert down == pytest.approx(-delta, rel=1e-12)


def test_for_lattice_inverts_derive_lattice():
    beam = derive_kinematics(200e3)
    drive = DriveParams.for_lattice(beam, 1.823, 1.0, 0.7, 0.4)
    model = derive_lattice(beam, drive)
    assert model.kappa_mag == pytest.approx(0.7, rel=1e-12)
    assert model.detuning == pytest.approx(1.0, rel=1e-12)
    assert model.phase_delay == pytest.approx(0.4, abs=1e-12)


def test_recoil_detuning_small():
    beam = derive_kinematics(200e3)
    drive = DriveParams(1.823, 8.0, 0.0, 1.59)
    assert 0 < recoil_detuning(beam, drive, 1) < 1e-5
    assert recoil_detuning(beam, drive, 3) == pytest.approx(3 * recoil_detuning(beam, drive, 1))


def test_synchronized_frequency_reference_grating():
    beam = BeamKinematics.from_beta(0.7)
    assert synchronized_frequency(beam, 1.14) == pytest.approx(1.156628, rel=1e-5)
