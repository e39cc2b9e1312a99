import csv

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from project.src.catalog import builtin
from project.src.classify import classify_point, full_report
from project.src.dynamics import Method, StepConfig
from project.src.experiments import (
    CHUNK_SIZE,
    LOCAL_HIGHDIM_HALF_WIDTH,
    SweepConfig,
    SweepResult,
    attribute,
    avoidance_check,
    basin_sweep,
    field_point_displacement,
    field_to_csv,
    highdim_experiment,
    sample_starts,
    sweep_both,
    vector_field_export,
)
from project.src.function_model import Box
from project.src.utils.error_utils import MinMaxInputError

ORIGIN = [0.0, 0.0]


def _total(result):
    return sum(result.counts) + result.diverged + result.exhausted + result.unmatched


def test_sample_starts_are_index_stable():
    box = Box.cube(-5, 5, 2)
    short = sample_starts(box, 10, seed=7)
    long = sample_starts(box, 300, seed=7)
    assert_array_equal(short, long[:10])
    assert np.all(long >= -5) and np.all(long <= 5)
    assert not np.array_equal(sample_starts(box, 10, seed=8), short)


def test_attribute_prefers_lexicographically_first_on_ties():
    targets = np.array([[-1.0, 0.0], [1.0, 0.0]])
    finals = np.array([[0.0, 0.0], [1.0005, 0.0], [5.0, 5.0]])
    assert attribute(finals, targets, radius=1.5).tolist() == [0, 1, -1]
    assert attribute(finals, targets, radius=1e-3).tolist() == [-1, 1, -1]


def test_f2_gda_diverges_and_ogda_converges(f2):
    origin = [f2.point(ORIGIN)]
    cfg = SweepConfig(
        box=Box.cube(-1, 1, 2), samples=64, method=Method.GDA, step=StepConfig(alpha=0.05, max_iters=5_000)
    )
    gda, ogda, superset = sweep_both(f2, origin, cfg)
    assert gda.diverged_fraction == 1.0
    assert ogda.per_point_fraction[(0.0, 0.0)] == 1.0
    assert superset
    assert _total(gda) == _total(ogda) == 64


def test_sweep_is_identical_for_any_thread_count(composite):
    points = [composite.point(c) for c in [(0, 0), (0, 1), (1, 0), (1, 1)]]
    base = SweepConfig(
        box=Box.cube(-0.5, 1.5, 2), samples=CHUNK_SIZE + 44, method=Method.OGDA,
        step=StepConfig(alpha=0.01, max_iters=3_000), seed=3,
    )
    single = basin_sweep(composite, points, base)
    threaded = basin_sweep(
        composite, points,
        SweepConfig(box=base.box, samples=base.samples, method=base.method, step=base.step, seed=3, threads=3),
    )
    assert single.counts == threaded.counts
    assert (single.diverged, single.exhausted, single.unmatched) == (
        threaded.diverged, threaded.exhausted, threaded.unmatched,
    )
    assert _total(single) == base.samples
    assert single.points == sorted(single.points)


def test_sweep_csv_and_dict(f2):
    cfg = SweepConfig(box=Box.cube(-1, 1, 2), samples=8, method="ogda", step=StepConfig(alpha=0.05, max_iters=5_000))
    result = basin_sweep(f2, [f2.point(ORIGIN)], cfg)
    text = result.to_csv(label="f2")
    lines = text.splitlines()
    assert lines[0] == "# function: f2"
    body = [line for line in lines if not line.startswith("#")]
    assert body == ["critical_point,fraction", '"(0,0)",1.0', "diverged,0.0", "unresolved,0.0"]
    assert next(csv.reader([body[1]])) == ["(0,0)", "1.0"]
    payload = result.to_dict()
    assert payload["seed"] == 0
    assert payload["per_point_fraction"][0]["count"] == 8


def test_sweep_validation(f2):
    with pytest.raises(MinMaxInputError):
        SweepConfig(box=Box.cube(-1, 1, 2), samples=0, method="gda")
    with pytest.raises(MinMaxInputError):
        basin_sweep(f2, [], SweepConfig(box=Box.cube(-1, 1, 2), samples=4, method="gda"))
    with pytest.raises(MinMaxInputError):
        basin_sweep(f2, [f2.point(ORIGIN)], SweepConfig(box=Box.cube(-1, 1, 3), samples=4, method="gda"))


def test_avoidance_counts_mass_at_unstable_points(f2):
    report = classify_point(f2, f2.point(ORIGIN), 0.05)
    cfg = SweepConfig(box=Box.cube(-1, 1, 2), samples=10, method=Method.GDA)
    landed = SweepResult(points=[(0.0, 0.0)], counts=[4], diverged=6, exhausted=0, unmatched=0, config=cfg)
    assert avoidance_check(f2, cfg, [report], landed) == pytest.approx(0.4)
    assert avoidance_check(f2, cfg.with_method("ogda"), [report], landed) == 0.0
    assert avoidance_check(f2, cfg, []) == 0.0


def test_avoidance_fraction_is_zero_in_practice(composite):
    box = Box.cube(-0.5, 1.5, 2)
    reports = full_report(composite, box, 0.01, seeds=20, assumption_samples=0)
    cfg = SweepConfig(box=box, samples=64, method=Method.GDA, step=StepConfig(alpha=0.01, max_iters=5_000), seed=1)
    assert avoidance_check(composite, cfg, reports) == 0.0


def test_vector_field_layout(f1):
    rows = vector_field_export(f1, Box.cube(-5, 5, 2), grid=50, alpha=0.001)
    assert rows.shape == (2500, 4)
    assert_allclose(rows[0, :2], [-5.0, -5.0])
    assert_allclose(rows[1, :2], [-5.0, -5.0 + 10.0 / 49])
    assert_allclose(rows[50, :2], [-5.0 + 10.0 / 49, -5.0])


def test_vector_field_displacement_is_one_gda_step(f1):
    box = Box.cube(-1, 1, 2)
    gda = vector_field_export(f1, box, grid=3, alpha=0.001)
    ogda = vector_field_export(f1, box, grid=3, alpha=0.001, method="ogda")
    assert_allclose(gda, ogda)
    center = gda[8]
    assert_allclose(center[:2], [1.0, 1.0])
    # grad f1(1, 1) = (0.35, -0.4)
    assert_allclose(center[2:], [-0.00035, -0.0004])
    assert_allclose(field_point_displacement(f1, f1.point([1.0, 1.0]), 0.001), center[2:])


def test_vector_field_rejects_higher_dimensions(w):
    with pytest.raises(MinMaxInputError, match="n = m = 1"):
        vector_field_export(w, Box.cube(-1, 1, 10), grid=5, alpha=0.01)


def test_field_csv_header(f1):
    text = field_to_csv(vector_field_export(f1, Box.cube(-1, 1, 2), grid=2, alpha=0.1), {"grid": 2})
    lines = text.splitlines()
    assert lines[:2] == ["# grid: 2", "x,y,dx,dy"]
    assert len(lines) == 2 + 4


def test_highdim_experiment_small():
    step = StepConfig(alpha=1e-3, max_iters=2_000)
    first = highdim_experiment(seed=0, samples=16, step=step)
    assert first == highdim_experiment(seed=0, samples=16, step=step, threads=2)
    assert all(0.0 <= frac <= 1.0 for frac in first)


def test_vector_field_rejects_unknown_method(f1):
    with pytest.raises(MinMaxInputError, match="sgd"):
        vector_field_export(f1, Box.cube(-1, 1, 2), grid=3, alpha=0.01, method="sgd")


@pytest.mark.parametrize("name,box", [
    ("xy", Box.cube(-1, 1, 2)),
    ("f1", Box.cube(-1, 1, 2)),
    ("f2", Box.cube(-1, 1, 2)),
    ("w", Box.cube(-1, 1, 10)),
    ("composite2d", Box.cube(-0.5, 1.5, 2)),
    ("planted10d", Box.cube(-0.1, 0.1, 10)),
])
def test_no_mass_at_unstable_points_for_any_builtin(name, box):
    f = builtin(name)
    reports = full_report(f, box, 0.01, seeds=20, assumption_samples=0)
    cfg = SweepConfig(box=box, samples=128, method=Method.GDA, step=StepConfig(alpha=0.01, max_iters=5_000), seed=3)
    assert avoidance_check(f, cfg, reports) <= 0.001
    assert avoidance_check(f, cfg.with_method("ogda"), reports) <= 0.001


def _mass_near(result, target, radius=1e-3):
    return sum(
        frac for p, frac in result.per_point_fraction.items()
        if np.linalg.norm(np.subtract(p, target)) < radius
    )


def _interior_point(reports):
    corners = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    interior = [r.point.as_tuple() for r in reports if np.min(np.linalg.norm(corners - r.point.as_tuple(), axis=1)) > 0.1]
    assert len(interior) == 1
    return interior[0]


@pytest.fixture(scope="module")
def composite_full_box_reports(composite):
    return full_report(composite, Box.cube(-5, 5, 2), 0.001, seed=0)


@pytest.mark.slow
def test_composite_sweep_full_size(composite, composite_full_box_reports):
    reports = composite_full_box_reports
    cfg = SweepConfig(box=Box.cube(-5, 5, 2), samples=10_000, method=Method.GDA, seed=0, threads=4)
    gda, ogda, superset = sweep_both(composite, [r.point for r in reports], cfg)
    assert superset
    assert avoidance_check(composite, cfg, reports, gda) <= 0.001
    assert avoidance_check(composite, cfg.with_method("ogda"), reports, ogda) <= 0.001
    for result in (gda, ogda):
        total = sum(result.per_point_fraction.values()) + result.diverged_fraction + result.unresolved_fraction
        assert total == pytest.approx(1.0)
        assert _mass_near(result, (0.0, 1.0)) == 0.0
        assert _mass_near(result, _interior_point(reports)) == 0.0
        assert _mass_near(result, (1.0, 0.0)) > 0.0
    assert gda.unresolved_fraction <= 0.15


@pytest.mark.slow
def test_composite_ogda_sweep_resolves_at_larger_step(composite, composite_full_box_reports):
    # at alpha = 1e-3 the OGDA spiral into (0, 0) contracts by about 1 - 7.5e-6 per step
    reports = composite_full_box_reports
    cfg = SweepConfig(
        box=Box.cube(-5, 5, 2), samples=2_000, method=Method.OGDA,
        step=StepConfig(alpha=0.01, max_iters=100_000), seed=0, threads=4,
    )
    ogda = basin_sweep(composite, [r.point for r in reports], cfg)
    assert ogda.unresolved_fraction <= 0.15
    assert _mass_near(ogda, (0.0, 0.0)) > 0.0
    assert _mass_near(ogda, (0.0, 1.0)) == 0.0


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_local_highdim_experiment_converges_for_both_methods(seed):
    step = StepConfig(alpha=1e-3, max_iters=100_000)
    gda, ogda = highdim_experiment(seed=seed, samples=300, step=step, threads=4, half_width=LOCAL_HIGHDIM_HALF_WIDTH)
    assert gda >= 0.5
    assert ogda >= 0.5
    assert ogda >= gda - 0.02


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_highdim_experiment_full_box_ogda_not_worse(seed):
    gda, ogda = highdim_experiment(seed=seed, samples=300, step=StepConfig(alpha=1e-3, max_iters=100_000), threads=4)
    assert 0.0 <= gda <= 1.0 and 0.0 <= ogda <= 1.0
    assert ogda >= gda - 0.02
