import pytest

from project.src.function_model import Box
from project.src.property_checks import (
    CHECKS,
    PropertyContext,
    results_to_text,
    run_property_suite,
)
from project.src.utils.error_utils import MinMaxInputError, PropertyFailure
from project.src.workflow_parser import PropertySpec, PropertySuite, parse_property_suite


def small_suite(**overrides):
    """The shipped suite with sample counts cut down for fast tests."""
    shipped = parse_property_suite()
    specs = [
        PropertySpec(
            name=p.name,
            samples=min(p.samples, 50),
            tolerance=overrides.get(p.name, p.tolerance),
            params=p.params,
        )
        for p in shipped.properties
    ]
    return PropertySuite(shipped.name, shipped.description, specs)


@pytest.mark.parametrize(
    "name,box",
    [("f2", (-1.0, 1.0)), ("xy", (-1.0, 1.0)), ("f1", (-2.0, 2.0)), ("w", (-1.0, 1.0))],
)
def test_suite_passes_on_catalog_functions(name, box):
    from project.src.catalog import builtin

    f = builtin(name)
    ctx = PropertyContext(f=f, alpha=0.05, box=Box.cube(*box, f.dim), seed=0, newton_seeds=20)
    results = run_property_suite(ctx, small_suite())
    failed = [r.name for r in results if not r.passed]
    assert failed == []
    assert [r.name for r in results] == list(CHECKS)


def test_local_minmax_checks_are_not_vacuous_on_w(w):
    ctx = PropertyContext(f=w, alpha=0.05, box=Box.cube(-1, 1, 10), newton_seeds=10)
    results = {r.name: r for r in run_property_suite(ctx, small_suite())}
    assert results["real_spectrum_minmax"].samples == 1
    assert results["inclusion_chain"].samples == 1
    assert not results["real_spectrum_minmax"].detail.startswith("vacuous")


def test_imaginary_spectrum_makes_minmax_check_vacuous(xy):
    ctx = PropertyContext(f=xy, alpha=0.05, box=Box.cube(-1, 1, 2), newton_seeds=10)
    suite = small_suite()
    result = run_property_suite(ctx, suite.only(["real_spectrum_minmax", "inclusion_chain"]))
    assert all(r.passed and r.detail.startswith("vacuous") for r in result)


def test_strict_mode_raises_after_running_everything(f2):
    ctx = PropertyContext(f=f2, alpha=0.05, box=Box.cube(-1, 1, 2), newton_seeds=10)
    suite = small_suite(ky_fan=-1.0).only(["ky_fan", "rho_h_bounded"])
    results = run_property_suite(ctx, suite)
    assert [r.passed for r in results] == [False, True]
    with pytest.raises(PropertyFailure, match="ky_fan"):
        run_property_suite(ctx, suite, strict=True)


def test_unknown_property_is_an_input_error(f2):
    ctx = PropertyContext(f=f2, alpha=0.05, box=Box.cube(-1, 1, 2))
    suite = PropertySuite("custom", properties=[PropertySpec(name="no_such_check")])
    with pytest.raises(MinMaxInputError, match="no_such_check"):
        run_property_suite(ctx, suite)


def test_disabled_properties_are_skipped(f2):
    ctx = PropertyContext(f=f2, alpha=0.05, box=Box.cube(-1, 1, 2))
    suite = PropertySuite("custom", properties=[
        PropertySpec(name="ky_fan", samples=5, tolerance=1e-10, enabled=False),
        PropertySpec(name="eigensolver_backward_error", samples=5, tolerance=1e-8, params={"max_dim": 4}),
    ])
    results = run_property_suite(ctx, suite)
    assert [r.name for r in results] == ["eigensolver_backward_error"]


def test_results_to_text(f2):
    ctx = PropertyContext(f=f2, alpha=0.05, box=Box.cube(-1, 1, 2))
    suite = PropertySuite("custom", properties=[PropertySpec(name="bilinear_alpha_sweep", samples=10, tolerance=1e-12)])
    text = results_to_text(run_property_suite(ctx, suite))
    assert text.startswith("PASS  bilinear_alpha_sweep")
    assert "n=10" in text
