"""
Monte Carlo experiments over GDA/OGDA dynamics.

A sweep draws `samples` uniform starts in a box, runs the chosen dynamics
from each, and attributes every converged trajectory to the nearest known
critical point within the attribution radius. Start i is drawn from its own
substream SeedSequence(seed, spawn_key=(i,)), and trajectories are run in
fixed index-ordered chunks, so results are bit-identical for any thread count.
"""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from project.src.classify import SmallAlphaVerdict, StabilityReport
from project.src.catalog import make_planted10d
from project.src.critical_points import CriticalPointSet
from project.src.dynamics import (
    CONVERGED,
    DIVERGED,
    Method,
    StepConfig,
    gda_step,
    run_batch,
)
from project.src.function_model import Box, MinMaxFunction, PointXY
from project.src.utils.error_utils import MinMaxInputError, print_diagnostic
from project.src.utils.validation_utils import require_count, require_positive


CHUNK_SIZE = 256
DEFAULT_ATTRIBUTION_RADIUS = 1e-3
SWEEP_ALPHA = 1e-3
SWEEP_MAX_ITERS = 100_000
HIGHDIM_BOX = (-5.0, 5.0)
LOCAL_HIGHDIM_HALF_WIDTH = 0.1


@dataclass(frozen=True)
class SweepConfig:
    box: Box
    samples: int
    method: Method
    step: StepConfig = field(default_factory=lambda: StepConfig(alpha=SWEEP_ALPHA, max_iters=SWEEP_MAX_ITERS))
    attribution_radius: float = DEFAULT_ATTRIBUTION_RADIUS
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        require_count("samples", self.samples)
        require_positive("attribution_radius", self.attribution_radius)
        require_count("threads", self.threads)
        object.__setattr__(self, "method", Method.parse(self.method))

    def with_method(self, method: Union[str, Method]) -> "SweepConfig":
        return SweepConfig(
            box=self.box, samples=self.samples, method=Method.parse(method), step=self.step,
            attribution_radius=self.attribution_radius, seed=self.seed, threads=self.threads,
        )

    def to_dict(self) -> Dict:
        return {
            "box": self.box.to_dict(),
            "samples": self.samples,
            "method": self.method.value,
            "step": self.step.to_dict(),
            "attribution_radius": self.attribution_radius,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class SweepResult:
    points: List[Tuple[float, ...]]
    counts: List[int]
    diverged: int
    exhausted: int
    unmatched: int
    config: SweepConfig

    @property
    def samples(self) -> int:
        return self.config.samples

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def per_point_fraction(self) -> Dict[Tuple[float, ...], float]:
        return {p: c / self.samples for p, c in zip(self.points, self.counts)}

    @property
    def diverged_fraction(self) -> float:
        return self.diverged / self.samples

    @property
    def unresolved_fraction(self) -> float:
        """Budget exhausted, or converged to no known critical point."""
        return (self.exhausted + self.unmatched) / self.samples

    def positive_mass_points(self) -> List[Tuple[float, ...]]:
        return [p for p, c in zip(self.points, self.counts) if c > 0]

    def to_dict(self) -> Dict:
        return {
            "config": self.config.to_dict(),
            "seed": self.seed,
            "per_point_fraction": [
                {"point": list(p), "fraction": c / self.samples, "count": c}
                for p, c in zip(self.points, self.counts)
            ],
            "diverged_fraction": self.diverged_fraction,
            "unresolved_fraction": self.unresolved_fraction,
            "budget_exhausted": self.exhausted,
            "converged_unattributed": self.unmatched,
        }

    def to_csv(self, label: str = "") -> str:
        buf = io.StringIO()
        _write_config_comments(buf, self.config.to_dict(), label)
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["critical_point", "fraction"])
        for p, c in zip(self.points, self.counts):
            writer.writerow(["(" + ",".join(f"{v:.10g}" for v in p) + ")", repr(c / self.samples)])
        writer.writerow(["diverged", repr(self.diverged_fraction)])
        writer.writerow(["unresolved", repr(self.unresolved_fraction)])
        return buf.getvalue()


def _write_config_comments(buf: io.StringIO, config: Dict, label: str) -> None:
    if label:
        buf.write(f"# function: {label}\n")
    for key, value in config.items():
        buf.write(f"# {key}: {value}\n")


# --- sampling and attribution ---

def sample_starts(box: Box, samples: int, seed: int) -> np.ndarray:
    """Start i comes from its own substream, independent of every other index."""
    starts = np.empty((samples, box.dim))
    for i in range(samples):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        starts[i] = rng.uniform(box.lower, box.upper)
    return starts


def attribute(finals: np.ndarray, targets: np.ndarray, radius: float) -> np.ndarray:
    """
    Index of the nearest target within radius for each final point, else -1.

    targets must be sorted lexicographically; argmin then breaks ties in
    favour of the lexicographically smallest target.
    """
    if targets.shape[0] == 0 or finals.shape[0] == 0:
        return np.full(finals.shape[0], -1)
    dist = np.linalg.norm(finals[:, None, :] - targets[None, :, :], axis=2)
    nearest = np.argmin(dist, axis=1)
    within = dist[np.arange(finals.shape[0]), nearest] <= radius
    return np.where(within, nearest, -1)


def _sorted_targets(critical_points: Union[CriticalPointSet, Sequence[PointXY]]) -> np.ndarray:
    points = critical_points.points if isinstance(critical_points, CriticalPointSet) else list(critical_points)
    if not points:
        raise MinMaxInputError("basin sweep needs at least one critical point")
    targets = np.array([p.vector for p in points])
    return targets[np.lexsort(targets.T[::-1])]


def _run_chunk(f: MinMaxFunction, starts: np.ndarray, cfg: SweepConfig, targets: np.ndarray) -> np.ndarray:
    """Returns per-row labels: target index, or -2 diverged, -3 exhausted, -1 unmatched."""
    batch = run_batch(f, starts, cfg.step, cfg.method)
    labels = np.full(starts.shape[0], -3)
    labels[batch.codes == DIVERGED] = -2
    conv = batch.codes == CONVERGED
    labels[conv] = attribute(batch.finals[conv], targets, cfg.attribution_radius)
    return labels


# --- sweeps ---

def basin_sweep(
    f: MinMaxFunction,
    critical_points: Union[CriticalPointSet, Sequence[PointXY]],
    cfg: SweepConfig,
) -> SweepResult:
    """
    Estimates the probability of converging to each critical point.

    Args:
        f: objective
        critical_points: known critical points (non-empty)
        cfg: sampling box, sample count, dynamics, step config, seed, threads

    Returns:
        SweepResult with counts in the order of the lexicographically sorted points
    """
    if cfg.box.dim != f.dim:
        raise MinMaxInputError(f"box has dimension {cfg.box.dim}, expected {f.dim}")
    targets = _sorted_targets(critical_points)
    starts = sample_starts(cfg.box, cfg.samples, cfg.seed)
    chunks = [starts[i:i + CHUNK_SIZE] for i in range(0, cfg.samples, CHUNK_SIZE)]
    print_diagnostic(
        "experiments", f"{cfg.method.value} sweep: {cfg.samples} samples in {len(chunks)} chunks, {cfg.threads} thread(s)"
    )

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            labels = list(pool.map(lambda c: _run_chunk(f, c, cfg, targets), chunks))
    else:
        labels = [_run_chunk(f, c, cfg, targets) for c in chunks]
    labels = np.concatenate(labels)

    counts = [int(np.sum(labels == k)) for k in range(targets.shape[0])]
    return SweepResult(
        points=[tuple(float(v) for v in t) for t in targets],
        counts=counts,
        diverged=int(np.sum(labels == -2)),
        exhausted=int(np.sum(labels == -3)),
        unmatched=int(np.sum(labels == -1)),
        config=cfg,
    )


def sweep_both(
    f: MinMaxFunction,
    critical_points: Union[CriticalPointSet, Sequence[PointXY]],
    cfg: SweepConfig,
) -> Tuple[SweepResult, SweepResult, bool]:
    """
    GDA and OGDA sweeps from identical starts.

    Returns:
        (gda_result, ogda_result, OGDA positive-mass set contains the GDA one)
    """
    gda = basin_sweep(f, critical_points, cfg.with_method(Method.GDA))
    ogda = basin_sweep(f, critical_points, cfg.with_method(Method.OGDA))
    superset = set(gda.positive_mass_points()) <= set(ogda.positive_mass_points())
    return gda, ogda, superset


def _small_alpha_verdict(report: StabilityReport, method: Method) -> SmallAlphaVerdict:
    return report.gda_small_alpha if method is Method.GDA else report.ogda_small_alpha


def avoidance_check(
    f: MinMaxFunction,
    cfg: SweepConfig,
    reports: Sequence[StabilityReport],
    result: Optional[SweepResult] = None,
) -> float:
    """
    Fraction of sampled trajectories that end at a point classified Unstable
    for cfg.method. Pass `result` to reuse an existing sweep over the same points.
    """
    if not reports:
        return 0.0
    if result is None:
        result = basin_sweep(f, [r.point for r in reports], cfg)
    unstable = {
        r.point.as_tuple() for r in reports
        if _small_alpha_verdict(r, cfg.method) is SmallAlphaVerdict.UNSTABLE
    }
    hits = sum(c for p, c in zip(result.points, result.counts) if p in unstable)
    return hits / result.samples


def highdim_experiment(
    seed: int,
    samples: int,
    step: StepConfig,
    threads: int = 1,
    sample_seed: Optional[int] = None,
    half_width: float = HIGHDIM_BOX[1],
) -> Tuple[float, float]:
    """
    Fractions of starts in [-half_width, half_width]^10 that converge to the
    origin of planted10d(seed). The default box is [-5, 5]^10; LOCAL_HIGHDIM_HALF_WIDTH
    gives the local variant where the quadratic part dominates.

    Returns:
        (gda_fraction, ogda_fraction)
    """
    f = make_planted10d(seed)
    origin = PointXY(np.zeros(f.n), np.zeros(f.m))
    cfg = SweepConfig(
        box=Box.cube(-half_width, half_width, f.dim),
        samples=samples,
        method=Method.GDA,
        step=step,
        seed=seed if sample_seed is None else sample_seed,
        threads=threads,
    )
    gda, ogda, _ = sweep_both(f, [origin], cfg)
    return gda.counts[0] / samples, ogda.counts[0] / samples


# --- vector field ---

def vector_field_export(
    f: MinMaxFunction,
    box: Box,
    grid: int,
    alpha: float,
    method: Union[str, Method] = Method.GDA,
) -> np.ndarray:
    """
    Displacements of one update step on a grid x grid mesh, for 2-D objectives.

    OGDA steps start from the warm lifted state (p, p), whose first step
    coincides with GDA, so both methods export the same field.

    Returns:
        (grid*grid, 4) array of rows (x, y, dx, dy), x varying slowest
    """
    method = Method.parse(method)
    if f.dim != 2:
        raise MinMaxInputError(f"vector field export needs n = m = 1, got n = {f.n}, m = {f.m}")
    grid = require_count("grid", grid, minimum=2)
    alpha = require_positive("alpha", alpha)
    if box.dim != 2:
        raise MinMaxInputError(f"box has dimension {box.dim}, expected 2")

    xs = np.linspace(box.lower[0], box.upper[0], grid)
    ys = np.linspace(box.lower[1], box.upper[1], grid)
    mesh = np.array([(x, y) for x in xs for y in ys])
    print_diagnostic("experiments", f"{method.value} field on a {grid}x{grid} grid")
    signs = np.array([-1.0, 1.0])
    # one GDA step, batched; equals gda_step row by row and the warm OGDA step
    displacement = alpha * signs * f.gradients(mesh)
    return np.hstack([mesh, displacement])


def field_to_csv(rows: np.ndarray, comments: Optional[Dict] = None) -> str:
    buf = io.StringIO()
    _write_config_comments(buf, comments or {}, "")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "dx", "dy"])
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def field_point_displacement(f: MinMaxFunction, p: PointXY, alpha: float) -> np.ndarray:
    """step(p) - p for a single point."""
    return gda_step(f, p, alpha).vector - p.vector
