import json

import pytest

from project.src.tool_registry import COMMAND_TOOLS, TOOL_DEFINITIONS, ToolRegistry
from project.src.utils.error_utils import exit_code_for
from tools.classify_function import classify_function
from tools.export_vector_field import export_vector_field
from tools.load_function import load_function
from tools.run_property_checks import run_property_checks
from tools.save_output import save_output
from tools.sweep_basins import sweep_basins
from tools.trace_dynamics import trace_dynamics


@pytest.fixture
def f2_file(tmp_path):
    path = tmp_path / "f2.json"
    path.write_text(json.dumps({
        "n": 1, "m": 1, "label": "f2 from file",
        "terms": [{"c": 0.5, "e": [2, 0]}, {"c": 0.5, "e": [0, 2]}, {"c": 4.0, "e": [1, 1]}],
    }), encoding="utf-8")
    return str(path)


def test_registry_lists_every_tool():
    names = [t["name"] for t in ToolRegistry().get_tool_info()]
    assert names == list(TOOL_DEFINITIONS)
    assert set(COMMAND_TOOLS.values()) <= set(names)


def test_registry_errors():
    registry = ToolRegistry()
    assert registry.execute("nope", {})["details"]["kind"] == "input"
    missing = registry.execute("trace_dynamics", {"source": "xy"})
    assert not missing["success"] and "start" in missing["error"]
    unexpected = registry.execute("load_function", {"source": "xy", "colour": "red"})
    assert "colour" in unexpected["error"]
    assert registry.run_command("plot", {})["details"]["kind"] == "input"


def test_registry_fills_defaults():
    result = ToolRegistry().execute("trace_dynamics", {"source": "f1", "start": [0.1, 0.1], "alpha": None, "max_iters": 5})
    assert result["success"]
    assert "# alpha: 0.001" in result["content"]
    assert result["steps_taken"] == 5


def test_load_function_from_builtin_and_file(f2_file):
    builtin = load_function("planted10d:3")
    assert builtin["success"] and (builtin["n"], builtin["m"]) == (5, 5)
    from_file = load_function(f2_file)
    assert from_file["success"] and from_file["label"] == "f2 from file"


@pytest.mark.parametrize("source", ["missing.json", "unknown_builtin", "bilinear:1,x"])
def test_load_function_errors_are_input_errors(source):
    result = load_function(source)
    assert not result["success"]
    assert exit_code_for(result) == 1


def test_classify_function_markdown(f2_file):
    result = classify_function(f2_file, alpha=0.05, box=[[-1, 1]], seeds=10, seed=0)
    assert result["success"]
    assert result["content"].startswith("# Critical points of f2 from file\n")
    assert len(result["reports"]) == 1
    assert result["reports"][0]["ogda_small_alpha"] == "Stable"
    assert result["notes"] == []


def test_classify_function_json_agrees_with_reference():
    result = classify_function("composite2d", box=[[-0.5, 1.5]], seeds=100, seed=0, output_format="json")
    assert result["success"]
    payload = json.loads(result["content"])
    assert payload["function"] == "composite2d"
    assert len(payload["reports"]) == 5
    assert payload["notes"] == []


def test_classify_function_notes_reference_points_outside_the_box():
    result = classify_function("composite2d", box=[[-0.5, 0.5]], seeds=20, seed=0, output_format="json")
    assert result["success"]
    notes = json.loads(result["content"])["notes"]
    assert "reference point (1, 0) is not among the computed critical points" in notes


def test_classify_function_rejects_csv():
    assert exit_code_for(classify_function("xy", output_format="csv")) == 1


def test_trace_dynamics():
    result = trace_dynamics("xy", [1.0, 1.0], method="gda", alpha=0.2, max_iters=5_000)
    assert result["success"]
    assert result["outcome"] == "diverged"
    rows = [line for line in result["content"].splitlines() if not line.startswith("#")]
    assert rows[0] == "t,x1,y1"
    assert len(rows) == 1 + result["steps_taken"] + 1


def test_trace_dynamics_start_length():
    result = trace_dynamics("xy", [1.0], max_iters=10)
    assert not result["success"] and exit_code_for(result) == 1


def test_sweep_basins_both(f2_file):
    result = sweep_basins(f2_file, method="both", alpha=0.05, samples=16, seed=0, box=[[-1, 1]], max_iters=5_000)
    assert result["success"]
    assert result["superset"] is True
    assert result["avoidance"] == {"gda": 0.0, "ogda": 0.0}
    assert result["results"]["gda"]["diverged_fraction"] == 1.0
    assert result["content"].count("# avoidance_fraction:") == 2


def test_sweep_basins_rejects_bad_method():
    result = sweep_basins("xy", method="sgd", samples=4, max_iters=10)
    assert exit_code_for(result) == 1


def test_export_vector_field():
    result = export_vector_field("f1", grid=4, alpha=0.01, box=[[-1, 1]], output_format="json")
    assert result["success"] and result["rows"] == 16
    assert len(json.loads(result["content"])["rows"]) == 16
    assert exit_code_for(export_vector_field("w", grid=4)) == 1


def test_run_property_checks_failure_keeps_table(tmp_path):
    suite = tmp_path / "suite.yaml"
    suite.write_text(
        "properties:\n"
        "  - name: ky_fan\n    samples: 5\n    tolerance: -1.0\n"
        "  - name: rho_h_bounded\n    samples: 5\n    tolerance: 1.0e-10\n",
        encoding="utf-8",
    )
    result = run_property_checks("f2", alpha=0.05, box=[[-1, 1]], suite_path=str(suite))
    assert not result["success"]
    assert result["details"]["failed"] == ["ky_fan"]
    assert exit_code_for(result) == 3
    assert "FAIL  ky_fan" in result["content"]
    assert "PASS  rho_h_bounded" in result["content"]


def test_run_property_checks_subset():
    result = run_property_checks("xy", alpha=0.1, box=[[-1, 1]], properties=["bilinear_alpha_sweep"], output_format="json")
    assert result["success"]
    assert [r["name"] for r in json.loads(result["content"])["results"]] == ["bilinear_alpha_sweep"]


def test_save_output(tmp_path, capsys):
    target = tmp_path / "out.csv"
    assert save_output("a,b\n", str(target))["file_path"] == str(target)
    assert target.read_text(encoding="utf-8") == "a,b\n"
    assert save_output("to stdout\n", "-")["file_path"] is None
    assert capsys.readouterr().out == "to stdout\n"
    missing = save_output("x", str(tmp_path / "no" / "such" / "dir.csv"))
    assert exit_code_for(missing) == 1
