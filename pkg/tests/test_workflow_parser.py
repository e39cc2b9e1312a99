import pytest

from project.src.property_checks import CHECKS
from project.src.utils.error_utils import MinMaxInputError
from project.src.workflow_parser import parse_property_suite


def test_shipped_suite_covers_every_check():
    suite = parse_property_suite()
    assert suite.name == "property_checks"
    assert sorted(suite.names()) == sorted(CHECKS)
    by_name = {p.name: p for p in suite.properties}
    assert by_name["ogda_root_sweep"].samples == 100_000
    assert by_name["char_poly_identity"].tolerance == pytest.approx(1e-8)
    assert by_name["eigensolver_backward_error"].params == {"max_dim": 24}
    assert all(isinstance(p.tolerance, float) for p in suite.properties)


def test_defaults_and_coercion(tmp_path):
    path = tmp_path / "suite.yaml"
    path.write_text(
        "name: mini\n"
        "defaults:\n"
        "  samples: 7\n"
        "  tolerance: 1e-6\n"
        "properties:\n"
        "  - name: ky_fan\n"
        "  - name: rho_h_bounded\n"
        "    samples: '3'\n"
        "    enabled: false\n",
        encoding="utf-8",
    )
    suite = parse_property_suite(str(path))
    ky_fan, rho = suite.properties
    assert (ky_fan.samples, ky_fan.tolerance, ky_fan.enabled) == (7, 1e-6, True)
    assert (rho.samples, rho.enabled) == (3, False)


@pytest.mark.parametrize(
    "text,message",
    [
        ("properties: 3\n", "'properties' list"),
        ("properties:\n  - samples: 3\n", "property 0"),
        ("properties:\n  - name: ky_fan\n    samples: many\n", "bad samples"),
        ("properties:\n  - name: ky_fan\n    samples: 0\n", "samples must be >= 1"),
        ("properties: [unclosed\n", "not valid YAML"),
    ],
)
def test_malformed_suites(tmp_path, text, message):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(MinMaxInputError, match=message):
        parse_property_suite(str(path))


def test_missing_suite(tmp_path):
    with pytest.raises(MinMaxInputError, match="not found"):
        parse_property_suite(str(tmp_path / "absent.yaml"))


def test_only_keeps_suite_order():
    suite = parse_property_suite().only(["ky_fan", "char_poly_identity"])
    assert suite.names() == ["char_poly_identity", "ky_fan"]
    with pytest.raises(MinMaxInputError):
        parse_property_suite().only(["nope"])
