"""
Multistart damped Newton search for critical points (grad f = 0) in a box.

Starts are a regular grid (low dimensions only) plus uniform random points.
All starts are iterated together; singular Newton systems fall back to a
least-squares step. Converged roots are sorted, deduplicated and restricted
to the box, so the result does not depend on the order starts finish in.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from project.src.function_model import Box, MinMaxFunction, PointXY
from project.src.utils.error_utils import MinMaxInputError, print_diagnostic
from project.src.utils.validation_utils import require_count


GRAD_TOL = 1e-10
ACCEPT_TOL = 1e-8
DEDUP_RADIUS = 1e-6
MAX_NEWTON_ITERS = 200
MAX_BACKTRACKS = 30
BACKTRACK_FACTOR = 0.5
SINGULAR_COND = 1e12
ESCAPE_NORM = 1e8
GRID_MAX_DIM = 3
GRID_POINTS_PER_AXIS = 11


@dataclass(frozen=True, eq=False)
class CriticalPointSet:
    points: List[PointXY]
    residuals: List[float]
    merged_multiplicity: List[int]
    lstsq_steps: int = field(default=0)

    def __len__(self) -> int:
        return len(self.points)

    def vectors(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 0))
        return np.array([p.vector for p in self.points])

    def to_dict(self) -> Dict:
        return {
            "points": [list(p.as_tuple()) for p in self.points],
            "residuals": [float(r) for r in self.residuals],
            "merged_multiplicity": [int(k) for k in self.merged_multiplicity],
        }


def _grid_starts(box: Box, per_axis: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(box.lower, box.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _newton_directions(hessians: np.ndarray, grads: np.ndarray) -> Tuple[np.ndarray, int]:
    """Solves H d = -g row by row; ill-conditioned systems use lstsq."""
    dirs = np.zeros_like(grads)
    cond = np.linalg.cond(hessians)
    good = np.isfinite(cond) & (cond < SINGULAR_COND)
    if np.any(good):
        dirs[good] = np.linalg.solve(hessians[good], -grads[good][..., None])[..., 0]
    bad = np.flatnonzero(~good)
    for i in bad:
        dirs[i] = np.linalg.lstsq(hessians[i], -grads[i], rcond=None)[0]
    return dirs, int(bad.size)


def newton_refine(f: MinMaxFunction, starts: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """
    Damped Newton on grad f = 0 for a batch of starts.

    The step length is halved (up to MAX_BACKTRACKS times) until ||grad f||^2
    decreases; a row stops when ||grad f|| <= GRAD_TOL, when no decrease is
    found, or after MAX_NEWTON_ITERS iterations.

    Returns:
        (points, residuals, finished, lstsq_count) where finished marks rows
        that stayed finite and bounded
    """
    z = f._batch(starts).copy()
    g = f.gradients(z)
    res = np.linalg.norm(g, axis=1)
    alive = np.all(np.isfinite(z), axis=1) & np.isfinite(res)
    active = alive & (res > GRAD_TOL)
    lstsq_count = 0

    for _ in range(MAX_NEWTON_ITERS):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        dirs, singular = _newton_directions(f.hessians(z[rows]), g[rows])
        lstsq_count += singular

        step = np.ones(rows.size)
        pending = np.arange(rows.size)
        new_z = z[rows].copy()
        new_g = g[rows].copy()
        accepted = np.zeros(rows.size, dtype=bool)
        for _ in range(MAX_BACKTRACKS + 1):
            trial = z[rows[pending]] + step[pending, None] * dirs[pending]
            with np.errstate(all="ignore"):
                trial_g = f.gradients(trial)
                trial_res = np.linalg.norm(trial_g, axis=1)
            ok = np.isfinite(trial_res) & (trial_res < res[rows[pending]])
            hit = pending[ok]
            new_z[hit], new_g[hit] = trial[ok], trial_g[ok]
            accepted[hit] = True
            pending = pending[~ok]
            if pending.size == 0:
                break
            step[pending] *= BACKTRACK_FACTOR

        z[rows], g[rows] = new_z, new_g
        res[rows] = np.linalg.norm(new_g, axis=1)
        escaped = np.linalg.norm(z[rows], axis=1) > ESCAPE_NORM
        alive[rows[escaped]] = False
        active[rows] = accepted & ~escaped & (res[rows] > GRAD_TOL)

    return z, res, alive, lstsq_count


def dedup_points(points: np.ndarray, residuals: np.ndarray, radius: float = DEDUP_RADIUS):
    """
    Merges points closer than radius, after sorting lexicographically.

    Returns:
        (representatives, residuals, multiplicities)
    """
    if points.shape[0] == 0:
        return points, residuals, np.zeros(0, dtype=int)
    order = np.lexsort(points.T[::-1])
    reps: List[np.ndarray] = []
    rep_res: List[float] = []
    counts: List[int] = []
    for i in order:
        for k, r in enumerate(reps):
            if np.linalg.norm(points[i] - r) <= radius:
                counts[k] += 1
                if residuals[i] < rep_res[k]:
                    reps[k], rep_res[k] = points[i], residuals[i]
                break
        else:
            reps.append(points[i])
            rep_res.append(float(residuals[i]))
            counts.append(1)
    reps_arr = np.array(reps)
    order = np.lexsort(reps_arr.T[::-1])
    return reps_arr[order], np.array(rep_res)[order], np.array(counts)[order]


def find_critical_points(
    f: MinMaxFunction,
    box: Box,
    seeds: int = 200,
    seed: int = 0,
    grid_per_axis: Optional[int] = None,
) -> CriticalPointSet:
    """
    Finds critical points of f inside box.

    Args:
        f: objective
        box: search region; only roots inside it are reported
        seeds: number of uniform random starts
        seed: RNG seed for the random starts
        grid_per_axis: grid starts per axis (default 11 when n+m <= 3, none above)

    Returns:
        CriticalPointSet sorted lexicographically by coordinates
    """
    seeds = require_count("seeds", seeds)
    if box.dim != f.dim:
        raise MinMaxInputError(f"box has dimension {box.dim}, expected {f.dim}")

    starts = [box.sample(np.random.default_rng(seed), seeds)]
    if grid_per_axis is None:
        grid_per_axis = GRID_POINTS_PER_AXIS if f.dim <= GRID_MAX_DIM else 0
    if grid_per_axis >= 2:
        starts.insert(0, _grid_starts(box, grid_per_axis))
    starts = np.concatenate(starts, axis=0)

    z, res, alive, lstsq_count = newton_refine(f, starts)
    if lstsq_count:
        print_diagnostic(
            "critical_points", f"{lstsq_count} singular Newton systems solved by least squares", always=True
        )

    keep = alive & (res <= ACCEPT_TOL)
    keep &= np.all(z >= box.lower - 1e-9, axis=1) & np.all(z <= box.upper + 1e-9, axis=1)
    reps, reps_res, counts = dedup_points(z[keep], res[keep])
    print_diagnostic("critical_points", f"{int(keep.sum())} of {starts.shape[0]} starts converged, {len(reps)} distinct roots")

    return CriticalPointSet(
        points=[PointXY.from_vector(r, f.n) for r in reps],
        residuals=[float(r) for r in reps_res],
        merged_multiplicity=[int(c) for c in counts],
        lstsq_steps=lstsq_count,
    )
