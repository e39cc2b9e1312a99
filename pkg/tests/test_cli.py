import main as cli


def _body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_classify_markdown_to_stdout(capsys):
    code = cli.main(["classify", "--fn", "f1", "--box", "-1", "1", "--seeds", "10"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("# Critical points of f1")


def test_missing_function_file_exits_with_input_error(capsys):
    assert cli.main(["classify", "--fn", "missing.json"]) == 1
    assert "ERROR:" in capsys.readouterr().err


def test_field_grid_writes_file(tmp_path):
    target = tmp_path / "field.csv"
    code = cli.main(["field", "--fn", "composite2d", "--grid", "50", "--alpha", "0.001", "--out", str(target)])
    assert code == 0
    rows = _body(target.read_text(encoding="utf-8"))
    assert rows[0] == "x,y,dx,dy"
    assert len(rows) == 1 + 2500


def test_trace_ogda_converges_on_xy(capsys):
    code = cli.main(["trace", "--fn", "xy", "--dyn", "ogda", "--alpha", "0.1", "--start", "1", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "# outcome: converged" in out
    assert _body(out)[0] == "t,x1,y1,px1,py1"


def test_sweep_json_with_two_box_pairs(capsys):
    code = cli.main([
        "sweep", "--fn", "f2", "--dyn", "ogda", "--alpha", "0.05", "--samples", "8",
        "--max-iters", "5000", "--box", "-1", "1", "--box", "-2", "2", "--format", "json",
    ])
    assert code == 0
    assert '"ogda"' in capsys.readouterr().out


def test_field_on_ten_dimensional_function_is_input_error():
    assert cli.main(["field", "--fn", "w"]) == 1


def test_check_failure_exit_code(tmp_path, capsys):
    suite = tmp_path / "suite.yaml"
    suite.write_text("properties:\n  - name: ky_fan\n    samples: 3\n    tolerance: -1.0\n", encoding="utf-8")
    code = cli.main(["check", "--fn", "f2", "--box", "-1", "1", "--suite", str(suite)])
    captured = capsys.readouterr()
    assert code == 3
    assert "FAIL  ky_fan" in captured.out


def test_check_selected_properties_pass(capsys):
    code = cli.main([
        "check", "--fn", "xy", "--alpha", "0.1", "--box", "-1", "1",
        "--properties", "bilinear_alpha_sweep", "eigensolver_backward_error",
    ])
    assert code == 0
    assert capsys.readouterr().out.count("PASS") == 2


def test_bad_exponent_in_function_file_exits_with_input_error(tmp_path, capsys):
    bad = tmp_path / "bad_exponent.json"
    bad.write_text('{"n": 1, "m": 1, "terms": [{"c": 1.0, "e": [1, "a"]}]}', encoding="utf-8")
    assert cli.main(["classify", "--fn", str(bad)]) == 1
    assert "term 0" in capsys.readouterr().err
