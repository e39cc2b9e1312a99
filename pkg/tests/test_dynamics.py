import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from project.src.dynamics import (
    LiftedState,
    Method,
    Outcome,
    StepConfig,
    gda_step,
    lifted_map,
    ogda_step,
    run,
    run_batch,
    trajectory_csv,
)
from project.src.utils.error_utils import MinMaxInputError


def test_gda_step_direction(f2):
    p = f2.point([1.0, -1.0])
    q = gda_step(f2, p, 0.1)
    g = f2.full_gradient(p)
    assert_allclose(q.vector, [1.0 - 0.1 * g[0], -1.0 + 0.1 * g[1]])


def test_first_ogda_step_from_warm_start_is_gda_step(f1):
    p = f1.point([0.3, -0.7])
    s = ogda_step(f1, LiftedState.from_point(p), 0.05)
    assert_allclose(s.cur.vector, gda_step(f1, p, 0.05).vector)
    assert_allclose(s.prev.vector, p.vector)


def test_lifted_map_agrees_with_ogda_step(composite):
    cur, prev = composite.point([0.2, 0.4]), composite.point([0.25, 0.35])
    s = ogda_step(composite, LiftedState(cur=cur, prev=prev), 0.01)
    assert_allclose(lifted_map(composite, LiftedState(cur=cur, prev=prev).vector, 0.01), s.vector)


def test_lifted_map_rejects_wrong_length(xy):
    with pytest.raises(MinMaxInputError):
        lifted_map(xy, np.zeros(3), 0.1)


@pytest.mark.parametrize("alpha", [0.2, 0.05, 0.01])
def test_gda_on_xy_grows_by_one_plus_alpha_squared(xy, alpha):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=alpha, max_iters=1_000), "gda", trace=True)
    norms = np.array([np.sum(row ** 2) for row in result.trace])
    t = np.arange(norms.size)
    assert_allclose(norms, 2.0 * (1 + alpha ** 2) ** t, rtol=1e-9)
    assert norms.size > 600


def test_gda_on_xy_diverges(xy):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=0.2, max_iters=5_000), "gda")
    assert result.outcome is Outcome.DIVERGED
    # sqrt(2) * 1.04^(t/2) first exceeds 1e6 near t = 688
    assert 680 <= result.diverged_step <= 695
    assert "exceeded" in result.diagnostic


@pytest.mark.slow
def test_gda_on_xy_diverges_at_small_step(xy):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=0.01, max_iters=500_000), "gda")
    assert result.outcome is Outcome.DIVERGED


def test_ogda_on_xy_converges(xy):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=0.1, max_iters=20_000), "ogda")
    assert result.outcome is Outcome.CONVERGED
    assert np.linalg.norm(result.point.vector) < 1e-6
    assert isinstance(result.final, LiftedState)


def test_gda_converges_on_f1(f1):
    result = run(f1, f1.point([0.5, 0.5]), StepConfig(alpha=0.1, max_iters=20_000), Method.GDA)
    assert result.outcome is Outcome.CONVERGED
    assert_allclose(result.point.vector, 0.0, atol=1e-6)


def test_gda_rejects_lifted_state(xy):
    with pytest.raises(MinMaxInputError):
        run(xy, LiftedState.from_point(xy.point([1.0, 1.0])), StepConfig(alpha=0.1), "gda")


@pytest.mark.parametrize("kwargs", [{"alpha": 0.0}, {"alpha": -1.0}, {"alpha": 0.1, "max_iters": 0}])
def test_step_config_validation(kwargs):
    with pytest.raises(MinMaxInputError):
        StepConfig(**kwargs)


def test_unknown_method():
    with pytest.raises(MinMaxInputError):
        Method.parse("sgd")


@pytest.mark.parametrize("method", ["gda", "ogda"])
def test_run_batch_is_deterministic(f2, method):
    starts = np.random.default_rng(1).uniform(-1, 1, size=(16, 2))
    cfg = StepConfig(alpha=0.05, max_iters=3_000)
    a = run_batch(f2, starts, cfg, method)
    b = run_batch(f2, starts, cfg, method)
    assert_array_equal(a.codes, b.codes)
    assert_array_equal(a.steps, b.steps)
    assert_array_equal(a.finals, b.finals)


def test_run_batch_row_matches_single_run(f1):
    starts = np.array([[0.5, -0.5], [2.0, 1.0]])
    cfg = StepConfig(alpha=0.1, max_iters=20_000)
    batch = run_batch(f1, starts, cfg, "ogda")
    single = run(f1, f1.point(starts[1]), cfg, "ogda")
    assert abs(int(batch.steps[1]) - single.steps_taken) <= 1
    assert_allclose(batch.finals[1], single.point.vector, atol=1e-12)


def test_trajectory_csv_layout(xy):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=0.1, max_iters=3), "ogda", trace=True)
    text = trajectory_csv(xy, result, "ogda", {"alpha": 0.1})
    lines = text.splitlines()
    assert lines[0] == "# alpha: 0.1"
    header = next(line for line in lines if not line.startswith("#"))
    assert header == "t,x1,y1,px1,py1"
    assert len([line for line in lines if not line.startswith("#")]) == 1 + 4


def test_trajectory_csv_needs_trace(xy):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=0.1, max_iters=3), "gda")
    with pytest.raises(MinMaxInputError):
        trajectory_csv(xy, result, "gda")


def test_overflow_keeps_the_last_finite_state(xy):
    cfg = StepConfig(alpha=1e200, max_iters=10, diverge_norm=1e300)
    result = run(xy, xy.point([1.0, 1.0]), cfg, "gda")
    assert result.outcome is Outcome.DIVERGED
    assert result.diverged_step == 2
    assert_allclose(result.final.vector, [-1e200, 1e200])
    assert "non-finite" in result.diagnostic

    lifted = run(xy, xy.point([1.0, 1.0]), cfg, "ogda")
    assert lifted.outcome is Outcome.DIVERGED
    assert_allclose(lifted.final.cur.vector, [-1e200, 1e200])
    assert_allclose(lifted.final.prev.vector, [1.0, 1.0])


def test_threshold_divergence_reports_the_large_state(xy):
    result = run(xy, xy.point([1.0, 1.0]), StepConfig(alpha=0.5, max_iters=1_000), "gda")
    assert result.outcome is Outcome.DIVERGED
    assert np.linalg.norm(result.final.vector) > 1e6
    assert "exceeded" in result.diagnostic
