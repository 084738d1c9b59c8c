import json

import pytest
import yaml

from pulsegate import scenarios
from pulsegate.cli import main
from pulsegate.errors import ConfigError


def _run(argv):
    return main([str(a) for a in argv])


def test_preset_yaml_roundtrip(tmp_path):
    for name in scenarios.PRESETS:
        sc = scenarios.preset(name)
        scenarios.save_scenario(sc, tmp_path / f"{name}.yaml")
        back = scenarios.load_scenario(tmp_path / f"{name}.yaml")
        assert back.to_dict() == sc.to_dict()


def test_shipped_scenarios_load():
    for name in ("qpg_design", "timeorder_appendix"):
        sc = scenarios.shipped(name)
        assert sc.analysis and scenarios.build_spec(sc).length == pytest.approx(10e-3)


def test_unknown_keys_and_analyses():
    with pytest.raises(ConfigError):
        scenarios.Scenario("x", {"flavor": "SFG", "colour": 3})
    with pytest.raises(ConfigError):
        scenarios.Scenario("x", {"flavor": "SFG"}, analysis=["plot"])


def test_missing_referenced_file(tmp_path):
    sc = scenarios.preset("fig4_qpg")
    sc.process["materials"] = {"o": "nowhere.yaml"}
    scenarios.save_scenario(sc, tmp_path / "s.yaml")
    with pytest.raises(ConfigError):
        scenarios.load_scenario(tmp_path / "s.yaml")


def test_design_run_is_deterministic(tmp_path, capsys):
    assert _run(["run", "qpg_design", "--grid", 128, "--out", tmp_path / "a"]) == 0
    assert _run(["run", "qpg_design", "--grid", 128, "--out", tmp_path / "b"]) == 0
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert ma == mb
    names = {e["file"] for e in ma["files"]}
    assert {"design.json", "jsa.txt", "schmidt.json", "device_report.json", "efficiency_sweep.csv"} <= names
    design = json.loads((tmp_path / "a" / "design.json").read_text())
    assert design["pump_wavelength_nm"] == pytest.approx(839.94, abs=0.01)
    assert design["required_peak_power_w"] > 0
    summary = json.loads((tmp_path / "a" / "schmidt.json").read_text())
    assert summary["kappa0_sq"] >= 0.9
    printed = capsys.readouterr().out.splitlines()
    assert printed[-1].endswith("manifest.json")


def test_empty_analysis_writes_only_manifest(tmp_path):
    sc = scenarios.preset("fig4_qpg")
    sc.analysis = []
    scenarios.save_scenario(sc, tmp_path / "e.yaml")
    assert _run(["run", tmp_path / "e.yaml", "--out", tmp_path / "o"]) == 0
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == ["manifest.json"]


def test_config_errors_exit_2(tmp_path, capsys):
    assert _run(["run", "no_such_scenario"]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"process": {"flavor": "XYZ", "pump": {"axis": "e"},
                                               "input": {"wavelength_nm": 1550, "axis": "o"}},
                                   "analysis": ["design"]}))
    assert _run(["run", bad, "--out", tmp_path / "o"]) == 2
    assert _run(["design", "--grid", 4, "--out", tmp_path / "o"]) == 2
    assert "error" in capsys.readouterr().err


def test_numeric_error_exit_3(tmp_path):
    sc = scenarios.preset("fig4_qpg")
    sc.process["gvm_window_nm"] = [1000.0, 1010.0]
    scenarios.save_scenario(sc, tmp_path / "n.yaml")
    assert _run(["design", tmp_path / "n.yaml", "--grid", 32, "--out", tmp_path / "o"]) == 3


def test_gvm_sweep_preset(tmp_path):
    assert _run(["preset", "fig6_gvm", "--out", tmp_path]) == 0
    lines = (tmp_path / "gvm_sweep.csv").read_text().splitlines()
    assert lines[0] == "# group-velocity-sweep v1"
    assert len(lines) == 2 + 121


def test_preset_write(tmp_path):
    assert _run(["preset", "fig3b", "--write", tmp_path / "p.yaml"]) == 0
    assert scenarios.load_scenario(tmp_path / "p.yaml").name == "fig3b"


def test_form_flag_and_single_analysis(tmp_path):
    assert _run(["jsa", "--grid", 64, "--form", "gauss", "--out", tmp_path]) == 0
    summary = json.loads((tmp_path / "jsa_summary.json").read_text())
    assert summary["form"] == "gauss"
    assert (tmp_path / "jsa.txt").read_text().startswith("# jsa v1")


def test_modematch_command(tmp_path):
    assert _run(["modematch", "fig5_mismatched", "--grid", 128, "--out", tmp_path]) == 0
    report = json.loads((tmp_path / "modematch.json").read_text())
    assert report["duration_ratio"] == 2.0
    assert report["modes"][0]["conversion_probability"] == pytest.approx(0.8, abs=0.03)


def test_accept_exit_codes(capsys):
    assert _run(["accept", "--criteria", "2,7"]) == 0
    assert _run(["accept", "--criteria", "1"]) == 4
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2 and out.count("[FAIL]") == 1
