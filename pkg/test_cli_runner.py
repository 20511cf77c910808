"""
Tests for the command-line surface, scenarios, artifacts and heatmaps.
"""

import json
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from config.scenario import ScenarioConfig, get_preset, load_scenario_from_file
from config.settings import Settings, TestingSettings
from main import main
from physics.errors import ArtifactError, ParameterValidationError
from physics.gate_protocol import GatePoint, ModeSet
from physics.trap_units import PhysicalConstants, TrapParameters, derive_scaled_units
from runners.gate_scan import gate_record
from storage.artifacts import ArtifactStore, to_jsonable
from storage.heatmap import emit_heatmap, heatmap_colors
from storage.records import ReproductionSummary

ROOT = Path(__file__).parent

SMALL_GATES = {
    "name": "small-gates",
    "ion_count": 12,
    "rydberg_ions": [2, 5, 8, 11],
    "gate_pairs": [[3, 4], [9, 10]],
    "pulse": {
        "nu_grid": {"start": 1.0, "stop": 4.0, "num": 3},
        "delay_grid": {"start": 0.0, "stop": 1.0, "num": 2},
        "delay_scan_nu_grid": {"start": 2.0, "stop": 3.0, "num": 2},
    },
}


def write_config(path: Path, payload: dict) -> str:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, json.loads(capsys.readouterr().out)


def test_single_ion_equilibrium(tmp_path, capsys):
    out = tmp_path / "out"
    code, result = run_cli(capsys, "equilibrium", "--config", ROOT / "configs" / "single_ion.json", "--out", out)
    assert code == 0
    assert result["status"] == "ok"
    assert (out / "equilibrium.csv").read_text() == "index,z_scaled\n1,0.0\n"
    assert (out / "scenario.json").exists()
    assert json.loads((out / "equilibrium.json").read_text())["ion_count"] == 1


def test_equilibrium_rerun_is_identical(tmp_path, capsys):
    config = write_config(tmp_path / "chain.json", {"ion_count": 20})
    for name in ("a", "b"):
        code, _ = run_cli(capsys, "equilibrium", "--config", config, "--out", tmp_path / name)
        assert code == 0
    assert (tmp_path / "a" / "equilibrium.csv").read_bytes() == (tmp_path / "b" / "equilibrium.csv").read_bytes()


def test_modes_with_rydberg_ions(tmp_path, capsys):
    config = write_config(tmp_path / "modes.json", {"ion_count": 12, "rydberg_ions": [3, 10]})
    out = tmp_path / "out"
    code, result = run_cli(capsys, "modes", "--config", config, "--out", out)
    assert code == 0
    for name in ("modes.csv", "frequencies.csv", "modes.svg", "localization.csv", "truncation.csv"):
        assert (out / name).exists(), name
    assert (out / "modes.svg").read_text().lstrip().startswith("<?xml")
    assert result["summary"]["subcrystals"] == {"4-9": [4, 5, 6, 7, 8, 9]}
    assert "modes.csv" in result["artifacts"]


def test_bare_mode_set_skips_localization(tmp_path, capsys):
    config = write_config(tmp_path / "modes.json", {"ion_count": 12, "rydberg_ions": [3, 10]})
    out = tmp_path / "out"
    code, result = run_cli(capsys, "modes", "--config", config, "--out", out, "--mode-set", "bare")
    assert code == 0
    assert result["summary"]["rydberg_ions"] == []
    assert not (out / "localization.csv").exists()


def test_gate_scan_with_threads(tmp_path, capsys):
    config = write_config(tmp_path / "gates.json", SMALL_GATES)
    out = tmp_path / "out"
    code, result = run_cli(capsys, "gate-scan", "--config", config, "--out", out, "--threads", 2)
    assert code == 0
    lines = (out / "gate_scan.csv").read_text().splitlines()
    assert lines[0] == "nu_over_omegas,nu_tau_over_2pi,delay,phi_11,phi_22,max_abs_alpha,fidelity,mode_set"
    assert [float(line.split(",")[1]) for line in lines[1:]] == [1.0, 2.5, 4.0]
    best = result["summary"]["best"]
    assert best["mode_set"] == "all"
    assert 0.0 <= best["max_fidelity"] <= 1.0
    assert isinstance(best["edge_maximum"], bool)
    assert 0.1 < result["summary"]["phonon_temperature_mk"] < 1.0


def test_delay_scan(tmp_path, capsys):
    config = write_config(tmp_path / "gates.json", SMALL_GATES)
    out = tmp_path / "out"
    code, result = run_cli(capsys, "delay-scan", "--config", config, "--out", out, "--mode-set", "bare")
    assert code == 0
    assert result["summary"]["worst"]["mode_set"] == "bare"
    assert len((out / "delay_scan.csv").read_text().splitlines()) == 3


def test_invalid_scenario_exits_with_validation_code(tmp_path, capsys):
    config = write_config(tmp_path / "bad.json", {"ion_count": 5, "unknown_key": 1})
    out = tmp_path / "out"
    code, result = run_cli(capsys, "equilibrium", "--config", config, "--out", out)
    assert code == 2
    assert result["status"] == "error"
    assert result["error"] == "ValidationError"
    assert json.loads((out / "error.json").read_text())["exit_code"] == 2


def test_gate_scan_without_pairs_is_rejected(tmp_path, capsys):
    code, result = run_cli(capsys, "gate-scan", "--preset", "bare-chain", "--out", tmp_path)
    assert code == 2
    assert result["error"] == "ParameterValidationError"


def test_missing_config_is_an_io_error(tmp_path, capsys):
    code, result = run_cli(capsys, "equilibrium", "--config", tmp_path / "missing.json", "--out", tmp_path)
    assert code == 4
    assert result["error"] == "FileNotFoundError"


def test_unwritable_output_is_an_io_error(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    code, result = run_cli(capsys, "equilibrium", "--config", ROOT / "configs" / "single_ion.json", "--out", blocker)
    assert code == 4
    assert result["error"] == "ArtifactError"


def test_bad_thread_count_is_rejected(tmp_path, capsys):
    code, _ = run_cli(capsys, "equilibrium", "--preset", "bare-chain", "--out", tmp_path, "--threads", 0)
    assert code == 2


def test_reproduce_bundle(tmp_path, capsys):
    config = write_config(
        tmp_path / "quick.json",
        {
            "pulse": {
                "nu_grid": {"start": 2.0, "stop": 3.0, "num": 2},
                "delay_grid": {"start": 0.0, "stop": 1.0, "num": 2},
                "delay_scan_nu_grid": {"start": 2.0, "stop": 3.0, "num": 2},
            }
        },
    )
    out = tmp_path / "out"
    code, result = run_cli(capsys, "reproduce-paper", "--config", config, "--out", out)
    assert code == 0
    summary = ReproductionSummary.model_validate(json.loads((out / "summary.json").read_text()))
    assert [g.mode_set for g in summary.gates] == ["all", "localized", "bare"]
    assert [d.mode_set for d in summary.delays] == ["all", "bare"]
    assert summary.decay.four_ion == pytest.approx(0.930, abs=2e-3)
    assert summary.bogoliubov.commutation_error < 1e-10
    assert summary.units.omega_ell_over_omegas == pytest.approx(150.0, abs=1.0)
    assert summary.equilibrium.central_relative_std < 0.05
    for name in summary.artifacts:
        assert (out / name).exists(), name
    assert "two_rydberg_modes/localization.csv" in summary.artifacts
    assert result["summary"]["version"] == summary.version


def test_schema_matches_summary_model():
    schema = json.loads((ROOT / "schemas" / "reproduction_summary.schema.json").read_text())
    assert set(schema["properties"]) == set(ReproductionSummary.model_fields)
    for name, field in ReproductionSummary.model_fields.items():
        annotation = field.annotation
        record = getattr(annotation, "__args__", (annotation,))[0]
        if hasattr(record, "model_fields"):
            assert set(schema["$defs"][record.__name__]["properties"]) == set(record.model_fields), name


def test_scenario_rules():
    with pytest.raises(ValidationError):
        ScenarioConfig(ion_count=10, rydberg_ions=[11])
    with pytest.raises(ValidationError):
        ScenarioConfig(ion_count=10, rydberg_ions=[3], gate_pairs=[(3, 4)])
    with pytest.raises(ValidationError):
        ScenarioConfig(ion_count=10, gate_pairs=[(1, 2), (2, 3)])
    with pytest.raises(ParameterValidationError):
        get_preset("five-rydberg")
    four = get_preset("four-rydberg")
    assert four.pair_indices() == [(45, 46), (53, 54)]
    assert four.rydberg_indices() == [44, 47, 52, 55]


def test_yaml_scenario_merges_preset():
    scenario = load_scenario_from_file(str(ROOT / "configs" / "two_rydberg.yaml"))
    assert scenario.name == "two-rydberg"
    assert scenario.rydberg_ions == [45, 56]
    quick = load_scenario_from_file(str(ROOT / "configs" / "quick_gate_scan.yaml"))
    assert quick.name == "quick-gate-scan"
    assert quick.gate_pairs == [(46, 47), (54, 55)]
    assert quick.pulse.nu_grid.num == 41


def test_testing_settings_are_valid():
    settings = TestingSettings()
    assert settings.validate_settings() == []
    assert Settings(DEFAULT_THREADS=0).validate_settings()


def test_artifact_store_writes_null_for_nan(tmp_path):
    store = ArtifactStore(TestingSettings(), tmp_path / "store")
    path = store.write_json({"value": float("nan"), "array": np.arange(2)}, "payload.json")
    assert json.loads(path.read_text()) == {"array": [0, 1], "value": None}
    assert store.get_stats()["files"] == 1
    child = store.subdirectory("nested")
    child.write_json({}, "inner.json")
    assert store.relative(store.written[-1]) == "nested/inner.json"
    assert to_jsonable(np.float64(np.inf)) is None


def test_artifact_store_maps_os_errors(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ArtifactError):
        ArtifactStore(TestingSettings(), blocker).initialize()


def test_heatmap_colors():
    zero = heatmap_colors(np.zeros((1, 1)))
    assert zero.shape == (1, 1, 4)
    assert zero[0, 0, :3].mean() < 0.3

    colors = heatmap_colors(np.eye(2))
    assert np.allclose(colors[0, 0], colors[1, 1])
    assert np.allclose(colors[0, 1], zero[0, 0])
    assert colors[0, 0, :3].mean() > colors[0, 1, :3].mean()


def test_heatmap_rejects_bad_input(tmp_path):
    with pytest.raises(ParameterValidationError):
        heatmap_colors(np.array([[np.nan]]))
    with pytest.raises(ParameterValidationError):
        emit_heatmap(np.zeros(3), tmp_path / "bad.svg")
    path = emit_heatmap(np.eye(3), tmp_path / "ok.svg")
    assert "<svg" in path.read_text()


def test_gate_record_flags_maximum_on_grid_edge():
    def point(factor, fidelity):
        return GatePoint(factor, factor, 0.0, ModeSet.BARE, [np.pi / 8], 0.01, fidelity)

    falling = [point(0.5, 0.93), point(1.0, 0.85), point(1.5, 0.80)]
    record = gate_record(falling, ModeSet.BARE)
    assert record.best_nu_tau_over_2pi == 0.5
    assert record.edge_maximum
    peaked = [point(0.5, 0.90), point(1.0, 0.999), point(1.5, 0.98)]
    assert not gate_record(peaked, ModeSet.BARE).edge_maximum
    assert gate_record([point(0.5, float("nan"))], ModeSet.BARE).max_fidelity is None


def test_wavenumber_sets_the_lamb_dicke_parameter():
    consts = PhysicalConstants.calcium_40()
    units = derive_scaled_units(TrapParameters(), consts)
    scenario = ScenarioConfig(coupling={"wavenumber": 1.2e7, "ion_scale": {3: 0.5}})
    coupling = scenario.gate_coupling(units)
    length = np.sqrt(consts.reduced_planck / (2 * consts.ion_mass * 150.0 * units.frequency_scale))
    assert coupling.eta_ref == pytest.approx(1.2e7 * length, rel=1e-12)
    assert coupling.omega_ref == 150.0
    assert coupling.ion_scale == {2: 0.5}
    assert ScenarioConfig().gate_coupling().eta_ref == 0.1
    with pytest.raises(ParameterValidationError):
        scenario.gate_coupling()
