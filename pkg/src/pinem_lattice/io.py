"""Run configuration, trace files and solver comparison.

Configurations are JSON documents validated against ``schema.json``.  All
physical numbers carry fixed units: fs for time, um for length, eV for
energy, rad for angles and rad/fs for angular frequencies.
"""

import copy
import csv
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources

import jsonschema
import numpy as np
from scipy.integrate import trapezoid

from .constants import CODATA
from .errors import ConfigError, DomainError, GridMismatchError
from .params import BeamKinematics, DriveParams, LatticeModel, derive_kinematics, derive_lattice
from .protocols import ScenarioSpec

UNITS = {
    "time": "fs",
    "length": "um",
    "energy": "eV",
    "angle": "rad",
    "angular_frequency": "rad/fs",
    "hopping": "1/fs",
    "field_strength": "V/um",
}

DEFAULTS = {
    "beam": {"kinetic_energy": 200000.0},
    "drive": {"phase_delay": 0.0, "interaction_length": 13.0},
    "solver": {"name": "tba", "samples": 201},
    "output": {"directory": "output", "formats": ["csv", "json"]},
}
DEFAULT_PHOTON_ENERGY = 1.2
DEFAULT_KAPPA = 0.7

REQUIRED_PARAMS = {
    "detuning_sweep": ("detunings",),
    "lensing": ("steps",),
    "talbot": ("period", "pattern"),
}
LATTICE_KEYS = ("detuning", "kappa")
PHYSICAL_KEYS = ("field_strength", "grating_period")


def load_schema():
    return json.loads(resources.files("pinem_lattice").joinpath("schema.json").read_text())


@dataclass(frozen=True)
class RunConfig:
    """Validated run request with the normalized document it came from."""

    scenario: ScenarioSpec
    output_dir: str
    formats: tuple
    sample_count: int
    solver_selection: str
    drive: DriveParams
    document: dict

    @property
    def model(self):
        return self.scenario.model

    @property
    def beam(self):
        return self.scenario.beam


def _fill_defaults(doc):
    doc = copy.deepcopy(doc)
    for key, values in DEFAULTS.items():
        section = doc.setdefault(key, {})
        for name, value in values.items():
            if name == "kinetic_energy" and "beta" in section:
                continue
            section.setdefault(name, copy.deepcopy(value))
    drive = doc["drive"]
    if "photon_energy" not in drive and "laser_angular_frequency" not in drive:
        drive["photon_energy"] = DEFAULT_PHOTON_ENERGY
    if not any(k in drive for k in PHYSICAL_KEYS):
        drive.setdefault("detuning", 0.0)
        drive.setdefault("kappa", DEFAULT_KAPPA)
    return doc


def _beam_from(section):
    if "beta" in section:
        if "kinetic_energy" in section:
            raise ConfigError("give either kinetic_energy or beta, not both", ("beam",))
        beta = section["beta"]
        if not 0 <= beta < 1:
            raise ConfigError(f"beta must lie in [0, 1), got {beta}", ("beam", "beta"))
        return BeamKinematics.from_beta(beta)
    return derive_kinematics(section["kinetic_energy"])


def _laser_frequency(drive):
    if "photon_energy" in drive and "laser_angular_frequency" in drive:
        raise ConfigError("give either photon_energy or laser_angular_frequency", ("drive",))
    if "photon_energy" in drive:
        return drive["photon_energy"] / CODATA.hbar
    return drive["laser_angular_frequency"]


def _model_from(drive, beam):
    omega = _laser_frequency(drive)
    lattice = [k for k in LATTICE_KEYS if k in drive]
    physical = [k for k in PHYSICAL_KEYS if k in drive]
    if lattice and physical:
        raise ConfigError("lattice keys (detuning, kappa) and grating keys "
                          "(field_strength, grating_period) cannot be mixed", ("drive",))
    phi = drive["phase_delay"]
    if physical:
        missing = [k for k in PHYSICAL_KEYS if k not in drive]
        if missing:
            raise ConfigError(f"missing {missing[0]!r}", ("drive", missing[0]))
        params = DriveParams(omega, drive["field_strength"], phi, drive["grating_period"],
                             drive["interaction_length"])
        return derive_lattice(beam, params), params
    model = LatticeModel.create(drive["kappa"], drive["detuning"], omega, phi)
    params = None
    if drive["detuning"] < omega and beam.beta > 0:
        params = DriveParams.for_lattice(beam, omega, drive["detuning"], drive["kappa"], phi,
                                         drive["interaction_length"])
    return model, params


def _scenario_params(section, drive, beam):
    kind = section["kind"]
    for key in REQUIRED_PARAMS.get(kind, ()):
        if key not in section:
            raise ConfigError(f"scenario {kind!r} requires {key!r}", ("scenario", key))
    params = {k: v for k, v in section.items() if k != "kind"}
    if kind == "detuning_sweep":
        if beam.velocity == 0:
            raise ConfigError("a sweep needs a moving electron", ("beam",))
        params["interaction_time"] = drive["interaction_length"] / beam.velocity
    return params


def build_config(document):
    """Validate a parsed JSON document and build a :class:`RunConfig`."""
    if not isinstance(document, dict):
        raise ConfigError("configuration must be a JSON object")
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(err.message, tuple(err.absolute_path))
    doc = _fill_defaults(document)
    try:
        beam = _beam_from(doc["beam"])
        model, drive = _model_from(doc["drive"], beam)
        grid = doc["solver"].get("grid", {})
        params = _scenario_params(doc["scenario"], doc["drive"], beam)
        if grid:
            params["grid"] = dict(grid)
        spec = ScenarioSpec(
            kind=doc["scenario"]["kind"],
            model=model,
            solver=doc["solver"]["name"],
            params=params,
            samples=doc["solver"]["samples"],
            beam=beam,
            step=doc["solver"].get("step"),
        )
    except DomainError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        scenario=spec,
        output_dir=doc["output"]["directory"],
        formats=tuple(doc["output"]["formats"]),
        sample_count=spec.samples,
        solver_selection=spec.solver,
        drive=drive,
        document=doc,
    )


def parse_config(text):
    """Parse UTF-8 JSON text into a validated :class:`RunConfig`.

    Empty text counts as an empty document, so the error names the missing
    ``scenario`` key.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        document = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return build_config(document)


def serialize(config):
    """Normalized JSON text of a config; parsing it gives an equal config."""
    return json.dumps(config.document, indent=2, sort_keys=True) + "\n"


def _finite(x):
    return float(x) if math.isfinite(x) else None


def derived_quantities(config):
    """Beam, lattice and drive values derived from a config (JSON-ready)."""
    beam, model = config.beam, config.model
    out = {
        "beam": {
            "kinetic_energy": beam.kinetic_energy,
            "gamma": beam.gamma,
            "beta": beam.beta,
            "velocity": beam.velocity,
            "wavenumber_k0": beam.wavenumber_k0,
        },
        "lattice": {
            "kappa_real": model.hopping_kappa.real,
            "kappa_imag": model.hopping_kappa.imag,
            "kappa_mag": model.kappa_mag,
            "phase_delay": model.phase_delay,
            "detuning": model.detuning,
            "lattice_constant": model.lattice_constant,
            "bloch_period": _finite(model.bloch_period),
            "synchronized": model.synchronized,
        },
    }
    if config.drive is not None:
        d = config.drive
        out["drive"] = {
            "laser_angular_frequency": d.laser_angular_frequency,
            "photon_energy": CODATA.hbar * d.laser_angular_frequency,
            "field_strength": d.field_strength,
            "grating_period": d.grating_period,
            "grating_wavevector": d.grating_wavevector,
            "interaction_length": d.interaction_length,
            "interaction_time": d.interaction_length / beam.velocity if beam.velocity else None,
        }
    return out


def trace_rows(trace):
    """Header and rows of the CSV layout ``t, n=..., mean_x, variance_x``."""
    header = ["t"] + [f"n={n}" for n in trace.indices] + ["mean_x", "variance_x"]
    rows = []
    for k, t in enumerate(trace.times):
        values = [t, *trace.spectra[k], trace.mean_x[k], trace.variance_x[k]]
        rows.append([repr(float(v)) for v in values])
    return header, rows


def _version():
    from . import __version__
    return f"pinem_lattice {__version__}"


def write_trace(trace, config, label="tba", summary=None):
    """Write the CSV spectrogram and/or JSON manifest of one trace.

    Files go to ``config.output_dir`` as ``<kind>_<label>.csv`` and
    ``<kind>_<label>.json``.  Returns the list of written paths.
    """
    base = os.path.join(config.output_dir, f"{config.scenario.kind}_{label}")
    written = []
    try:
        os.makedirs(config.output_dir, exist_ok=True)
        if "csv" in config.formats:
            header, rows = trace_rows(trace)
            with open(base + ".csv", "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
            written.append(base + ".csv")
        if "json" in config.formats:
            manifest = {
                "run": config.document,
                "derived": derived_quantities(config),
                "units": UNITS,
                "trace": {
                    "label": label,
                    "window": list(trace.window),
                    "samples": int(trace.times.size),
                    "norm_drift": trace.norm_drift,
                    "info": {k: v for k, v in trace.info.items() if isinstance(v, (int, float, str))},
                },
                "summary": summary or {},
                "files": [os.path.basename(p) for p in written] + [os.path.basename(base + ".json")],
                "version": _version(),
                "timestamp": datetime.now(timezone.utc).isoformat(),
            }
            with open(base + ".json", "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
                fh.write("\n")
            written.append(base + ".json")
    except OSError as exc:
        raise OSError(f"cannot write {exc.filename or base}: {exc.strerror}") from exc
    return written


def write_summary(name, payload, config):
    """Write a JSON document next to the traces and return its path."""
    path = os.path.join(config.output_dir, name)
    os.makedirs(config.output_dir, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({**payload, "units": UNITS, "version": _version()}, fh, indent=2,
                  sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def read_trace_csv(path):
    """Read back a trace CSV as ``(header, array)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    pair: tuple
    l2_error: float
    linf_error: float
    per_time_errors: np.ndarray

    def as_dict(self):
        return {"pair": list(self.pair), "l2_error": self.l2_error, "linf_error": self.linf_error,
                "per_time_errors": self.per_time_errors.tolist()}


def compare_traces(a, b, pair=("a", "b")):
    """Population differences between two traces on the same grid.

    ``l2`` is the time average (trapezoid rule) of ``sum_n (P_a - P_b)^2``,
    square-rooted, and ``linf = max |P_a - P_b|``.
    ``per_time_errors`` holds ``sqrt(sum_n (P_a - P_b)^2)`` per sample.
    """
    if a.window != b.window:
        raise GridMismatchError(f"windows differ: {a.window} vs {b.window}")
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=1e-12, atol=1e-12):
        raise GridMismatchError("time grids differ; resample first")
    diff = a.spectra - b.spectra
    per_time = np.sqrt(np.sum(diff**2, axis=1))
    span = a.times[-1] - a.times[0]
    if a.times.size > 1 and span > 0:
        l2 = math.sqrt(float(trapezoid(per_time**2, a.times)) / span)
    else:
        l2 = float(per_time[0])
    return ComparisonReport(tuple(pair), l2, float(np.max(np.abs(diff))), per_time)
