import json
import math

import numpy as np
import pytest

from pinem_lattice import io
from pinem_lattice.cli import main
from pinem_lattice.errors import ConfigError, GridMismatchError
from pinem_lattice.params import LatticeModel
from pinem_lattice.tba import TraceRecord

BREATHING = {
    "scenario": {"kind": "breathing"},
    "drive": {"laser_angular_frequency": 1.0, "detuning": 1.0, "kappa": 0.7},
}


def small_trace(lo=-2, hi=2, samples=3, scale=1.0):
    n = np.arange(lo, hi + 1)
    amps = [np.exp(-0.5 * (n - 0.2 * k) ** 2) * scale for k in range(samples)]
    amps = [a / np.linalg.norm(a) for a in amps]
    return TraceRecord.from_amplitudes(np.linspace(0, 1, samples), amps, (lo, hi), 1.0)


def write(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_parse_minimal_breathing():
    config = io.parse_config(json.dumps(BREATHING))
    assert config.model.bloch_period == pytest.approx(2 * math.pi)
    assert config.solver_selection == "tba"
    assert config.formats == ("csv", "json")
    assert config.beam.kinetic_energy == 200e3


def test_empty_config_names_scenario():
    with pytest.raises(ConfigError) as info:
        io.parse_config("")
    assert "scenario" in str(info.value)


def test_serialize_round_trip():
    config = io.parse_config(json.dumps(BREATHING))
    again = io.parse_config(io.serialize(config))
    assert again.document == config.document
    assert io.serialize(again) == io.serialize(config)


@pytest.mark.parametrize("doc, where", [
    ({**BREATHING, "extra": 1}, ""),
    ({"scenario": {"kind": "breathing", "colour": "red"}}, "scenario"),
    ({"scenario": {"kind": "breathing"}, "beam": {"beta": 1.0}}, "beam/beta"),
    ({"scenario": {"kind": "breathing"}, "beam": {"beta": 0.5, "kinetic_energy": 1e5}}, "beam"),
    ({"scenario": {"kind": "talbot"}}, "scenario/period"),
    ({"scenario": {"kind": "breathing"}, "drive": {"kappa": 0.7, "field_strength": 10.0}}, "drive"),
    ({"scenario": {"kind": "breathing"}, "solver": {"samples": 1}}, "solver/samples"),
])
def test_invalid_configs(doc, where):
    with pytest.raises(ConfigError) as info:
        io.build_config(doc)
    assert info.value.path == tuple(p for p in where.split("/") if p)


def test_invalid_json():
    with pytest.raises(ConfigError):
        io.parse_config("{not json")


def test_physical_drive_config():
    doc = {"scenario": {"kind": "breathing"},
           "drive": {"laser_angular_frequency": 2.36, "field_strength": 10.0, "grating_period": 0.8}}
    config = io.build_config(doc)
    assert config.drive.field_strength == 10.0
    assert config.model.kappa_mag > 0


def test_csv_layout(tmp_path):
    config = io.build_config({**BREATHING, "output": {"directory": str(tmp_path)}})
    paths = io.write_trace(small_trace(), config, "tba")
    header, data = io.read_trace_csv(paths[0])
    assert data.shape == (3, 8)
    assert header == ["t", "n=-2", "n=-1", "n=0", "n=1", "n=2", "mean_x", "variance_x"]
    np.testing.assert_allclose(data[:, 1:6].sum(axis=1), 1.0, atol=1e-12)


def test_manifest_contents(tmp_path):
    config = io.build_config({**BREATHING, "output": {"directory": str(tmp_path)}})
    paths = io.write_trace(small_trace(), config, "tba", {"note": 1})
    manifest = json.loads(open(paths[1]).read())
    assert manifest["derived"]["lattice"]["bloch_period"] == pytest.approx(2 * math.pi)
    assert manifest["units"]["time"] == "fs"
    assert manifest["files"] == ["breathing_tba.csv", "breathing_tba.json"]
    assert manifest["summary"] == {"note": 1}
    assert manifest["version"].startswith("pinem_lattice")


def test_compare_identical_and_perturbed():
    a = small_trace()
    report = io.compare_traces(a, a)
    assert report.l2_error == 0.0 and report.linf_error == 0.0
    spectra = a.spectra.copy()
    spectra[:, 2] += 1e-3
    b = TraceRecord(a.times, spectra, a.mean_x, a.variance_x, a.amplitudes_final, a.window,
                    a.lattice_constant)
    report = io.compare_traces(a, b)
    assert report.linf_error == pytest.approx(1e-3)
    assert report.l2_error == pytest.approx(1e-3, rel=1e-9)


def test_compare_grid_mismatch():
    with pytest.raises(GridMismatchError):
        io.compare_traces(small_trace(), small_trace(-3, 3))
    with pytest.raises(GridMismatchError):
        io.compare_traces(small_trace(), small_trace(samples=4))


def test_cli_params(tmp_path, capsys):
    assert main(["params", write(tmp_path, BREATHING)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lattice"]["bloch_period"] == pytest.approx(2 * math.pi)


def test_cli_simulate_is_byte_identical(tmp_path):
    doc = {**BREATHING, "solver": {"samples": 11}}
    path = write(tmp_path, doc)
    assert main(["simulate", path, "--output-dir", str(tmp_path / "a")]) == 0
    assert main(["simulate", path, "--output-dir", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "breathing_tba.csv").read_bytes()
    assert first == (tmp_path / "b" / "breathing_tba.csv").read_bytes()


def test_cli_config_error(tmp_path, capsys):
    assert main(["simulate", write(tmp_path, {"scenario": {"kind": "nope"}})]) == 2
    assert main(["params", str(tmp_path / "missing.json")]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_guard_error(tmp_path, capsys):
    doc = {"scenario": {"kind": "breathing", "duration": 20.0}, "drive": {"detuning": 1.0},
           "solver": {"name": "tdse", "samples": 5, "grid": {"periods": 4, "points_per_period": 16}},
           "output": {"directory": str(tmp_path)}}
    assert main(["simulate", write(tmp_path, doc)]) == 3
    assert "numerical guard" in capsys.readouterr().err


def test_cli_compare_tolerance(tmp_path, capsys):
    doc = {**BREATHING, "solver": {"samples": 21}}
    path = write(tmp_path, doc)
    assert main(["compare", path, "--solvers", "tba", "analytic", "--assert-tol", "1e-6"]) == 0
    assert main(["compare", path, "--solvers", "tba", "analytic", "--assert-tol", "1e-14"]) == 4
    lensing = write(tmp_path, {"scenario": {"kind": "lensing", "steps": [{"g": 1, "phase": 0}]}},
                    "lens.json")
    assert main(["compare", lensing]) == 2


def test_cli_sweep(tmp_path, capsys):
    doc = {"scenario": {"kind": "detuning_sweep", "detunings": [1.0]},
           "output": {"directory": str(tmp_path)}}
    assert main(["sweep", write(tmp_path, doc), "--min", "2", "--max", "8", "--points", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["peak_spread_exponent"] == pytest.approx(-1.0, abs=0.02)
    assert main(["sweep", write(tmp_path, doc), "--min", "5", "--max", "2"]) == 2


def test_zero_detuning_model_has_infinite_period():
    config = io.build_config({"scenario": {"kind": "breathing"}})
    assert config.model == LatticeModel.create(0.7, 0.0, config.model.lattice_constant)
    assert io.derived_quantities(config)["lattice"]["bloch_period"] is None
