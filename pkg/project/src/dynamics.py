"""
GDA and OGDA iterations for min-max objectives.

GDA:   x' = x - a*grad_x f(x, y),  y' = y + a*grad_y f(x, y)
OGDA:  x' = x - 2a*grad_x f(x_t, y_t) + a*grad_x f(x_{t-1}, y_{t-1})
       y' = y + 2a*grad_y f(x_t, y_t) - a*grad_y f(x_{t-1}, y_{t-1})

OGDA has memory, so its state is lifted to (x_t, y_t, x_{t-1}, y_{t-1}); the
lifted map is memoryless and its fixed points are exactly (x*, y*, x*, y*) for
critical points (x*, y*).

run() and run_batch() share one vectorized engine. A batch is a (B, n+m)
array of starts; every row evolves independently, so results for a row do
not depend on which other rows share its batch beyond BLAS blocking, and
callers that need bit-identical results fix the batch composition.
"""

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from project.src.function_model import MinMaxFunction, PointXY
from project.src.utils.error_utils import MinMaxInputError
from project.src.utils.validation_utils import require_count, require_positive


class Method(str, enum.Enum):
    GDA = "gda"
    OGDA = "ogda"

    @classmethod
    def parse(cls, value: Union[str, "Method"]) -> "Method":
        if isinstance(value, Method):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise MinMaxInputError(f"unknown dynamics '{value}', expected 'gda' or 'ogda'")


class Outcome(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    BUDGET_EXHAUSTED = "budget_exhausted"


# integer codes used by the batch engine
RUNNING, CONVERGED, DIVERGED, EXHAUSTED = 0, 1, 2, 3
_CODE_TO_OUTCOME = {CONVERGED: Outcome.CONVERGED, DIVERGED: Outcome.DIVERGED, EXHAUSTED: Outcome.BUDGET_EXHAUSTED}


@dataclass(frozen=True)
class StepConfig:
    """Step size, iteration budget and convergence / divergence thresholds."""
    alpha: float
    max_iters: int = 10_000
    conv_step_tol: float = 1e-9
    conv_grad_tol: float = 1e-7
    diverge_norm: float = 1e6

    def __post_init__(self):
        require_positive("alpha", self.alpha)
        require_count("max_iters", self.max_iters)
        require_positive("conv_step_tol", self.conv_step_tol)
        require_positive("conv_grad_tol", self.conv_grad_tol)
        require_positive("diverge_norm", self.diverge_norm)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "max_iters": self.max_iters,
            "conv_step_tol": self.conv_step_tol,
            "conv_grad_tol": self.conv_grad_tol,
            "diverge_norm": self.diverge_norm,
        }


@dataclass(frozen=True, eq=False)
class LiftedState:
    """OGDA memory: cur = (x_t, y_t), prev = (x_{t-1}, y_{t-1})."""
    cur: PointXY
    prev: PointXY

    def __post_init__(self):
        if self.cur.x.shape != self.prev.x.shape or self.cur.y.shape != self.prev.y.shape:
            raise MinMaxInputError("lifted state slots have different dimensions")

    @classmethod
    def from_point(cls, p: PointXY) -> "LiftedState":
        """Warm start prev = cur, which makes the first OGDA step a plain GDA step."""
        return cls(cur=p, prev=p)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.cur.vector, self.prev.vector])


@dataclass(frozen=True, eq=False)
class TrajectoryResult:
    outcome: Outcome
    steps_taken: int
    final: Union[PointXY, LiftedState]
    diverged_step: Optional[int] = None
    diagnostic: str = ""
    trace: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def point(self) -> PointXY:
        """The last (x, y); for OGDA the current slot of the lifted state."""
        return self.final.cur if isinstance(self.final, LiftedState) else self.final


@dataclass(frozen=True, eq=False)
class BatchResult:
    """Per-row outcome codes, step counts and final current points."""
    codes: np.ndarray
    steps: np.ndarray
    finals: np.ndarray
    final_prevs: Optional[np.ndarray] = None


def _signs(f: MinMaxFunction) -> np.ndarray:
    return np.concatenate([-np.ones(f.n), np.ones(f.m)])


def _gda_update(cur: np.ndarray, g_cur: np.ndarray, signs: np.ndarray, alpha: float) -> np.ndarray:
    return cur + alpha * signs * g_cur


def _ogda_update(cur: np.ndarray, g_cur: np.ndarray, g_prev: np.ndarray, signs: np.ndarray, alpha: float) -> np.ndarray:
    return cur + signs * (2.0 * alpha * g_cur - alpha * g_prev)


# --- single steps ---

def gda_step(f: MinMaxFunction, p: PointXY, alpha: float) -> PointXY:
    """One GDA step: (x - a*grad_x f, y + a*grad_y f)."""
    alpha = require_positive("alpha", alpha)
    z = f._vector(p)
    return PointXY.from_vector(_gda_update(z, f.full_gradient(z), _signs(f), alpha), f.n)


def ogda_step(f: MinMaxFunction, s: LiftedState, alpha: float) -> LiftedState:
    """One OGDA step on the lifted state; the new prev is the old cur."""
    alpha = require_positive("alpha", alpha)
    cur, prev = f._vector(s.cur), f._vector(s.prev)
    new = _ogda_update(cur, f.full_gradient(cur), f.full_gradient(prev), _signs(f), alpha)
    return LiftedState(cur=PointXY.from_vector(new, f.n), prev=s.cur)


def lifted_map(f: MinMaxFunction, z: np.ndarray, alpha: float) -> np.ndarray:
    """
    The memoryless OGDA map g on R^(2(n+m)).

    g(x, y, z, w) = (x - 2a grad_x f(x,y) + a grad_x f(z,w),
                     y + 2a grad_y f(x,y) - a grad_y f(z,w),
                     x, y)
    """
    alpha = require_positive("alpha", alpha)
    z = np.asarray(z, dtype=float)
    d = f.dim
    if z.shape != (2 * d,):
        raise MinMaxInputError(f"lifted vector must have length {2 * d}, got {z.shape}")
    cur, prev = z[:d], z[d:]
    head = _ogda_update(cur, f.full_gradient(cur), f.full_gradient(prev), _signs(f), alpha)
    return np.concatenate([head, cur])


# --- the engine ---

def _engine(
    f: MinMaxFunction,
    cur: np.ndarray,
    prev: Optional[np.ndarray],
    cfg: StepConfig,
    method: Method,
    trace: Optional[List[np.ndarray]] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, Optional[np.ndarray]]:
    body = f.body
    signs = _signs(f)
    alpha = cfg.alpha
    ogda = method is Method.OGDA
    total = cur.shape[0]

    codes = np.full(total, EXHAUSTED, dtype=np.int8)
    steps = np.full(total, cfg.max_iters, dtype=np.int64)
    finals = cur.copy()
    final_prevs = prev.copy() if ogda else None

    rows = np.arange(total)
    cur = cur.copy()
    g_cur = body.gradients(cur)
    if ogda:
        prev = prev.copy()
        g_prev = body.gradients(prev)

    if trace is not None:
        trace.append(np.concatenate([cur[0], prev[0]]) if ogda else cur[0].copy())

    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, cfg.max_iters + 1):
            if ogda:
                new = _ogda_update(cur, g_cur, g_prev, signs, alpha)
                moved = np.sqrt(np.sum((new - cur) ** 2, axis=1) + np.sum((cur - prev) ** 2, axis=1))
                norm = np.sqrt(np.sum(new ** 2, axis=1) + np.sum(cur ** 2, axis=1))
            else:
                new = _gda_update(cur, g_cur, signs, alpha)
                moved = np.linalg.norm(new - cur, axis=1)
                norm = np.linalg.norm(new, axis=1)

            bad = ~np.isfinite(norm) | (norm > cfg.diverge_norm)
            g_new = np.zeros_like(new)
            ok = ~bad
            if np.any(ok):
                g_new[ok] = body.gradients(new[ok])
            grad_norm = np.linalg.norm(g_new, axis=1)
            bad |= ~np.isfinite(grad_norm)
            done = ~bad & (moved <= cfg.conv_step_tol) & (grad_norm <= cfg.conv_grad_tol)

            if trace is not None:
                trace.append(np.concatenate([new[0], cur[0]]) if ogda else new[0].copy())

            finished = bad | done
            if np.any(finished):
                idx = rows[finished]
                codes[idx] = np.where(bad[finished], DIVERGED, CONVERGED)
                steps[idx] = t
                # a non-finite update keeps the last finite state
                finite = np.all(np.isfinite(new[finished]), axis=1)[:, None]
                finals[idx] = np.where(finite, new[finished], cur[finished])
                if ogda:
                    final_prevs[idx] = np.where(finite, cur[finished], prev[finished])
                keep = ~finished
                rows, new, g_new, cur, g_cur = rows[keep], new[keep], g_new[keep], cur[keep], g_cur[keep]
                if rows.size == 0:
                    break

            if ogda:
                prev, g_prev = cur, g_cur
            cur, g_cur = new, g_new

    if rows.size:
        finals[rows] = cur
        if ogda:
            final_prevs[rows] = prev
    return codes, steps, finals, final_prevs


def run_batch(
    f: MinMaxFunction,
    starts: np.ndarray,
    cfg: StepConfig,
    method: Union[str, Method],
    prevs: Optional[np.ndarray] = None,
) -> BatchResult:
    """
    Runs many trajectories at once.

    Args:
        starts: (B, n+m) initial points
        prevs: (B, n+m) OGDA memory slots (default: equal to starts)
    """
    method = Method.parse(method)
    starts = f._batch(starts)
    if method is Method.OGDA:
        prevs = starts if prevs is None else f._batch(prevs)
        if prevs.shape != starts.shape:
            raise MinMaxInputError("prevs must have the same shape as starts")
    codes, steps, finals, final_prevs = _engine(f, starts, prevs, cfg, method)
    return BatchResult(codes=codes, steps=steps, finals=finals, final_prevs=final_prevs)


def run(
    f: MinMaxFunction,
    start: Union[PointXY, LiftedState],
    cfg: StepConfig,
    method: Union[str, Method],
    trace: bool = False,
) -> TrajectoryResult:
    """
    Iterates GDA or OGDA from one start until convergence, divergence or budget.

    Converged: ||state_{t+1} - state_t|| <= conv_step_tol and ||grad f|| <= conv_grad_tol.
    Diverged: state norm > diverge_norm, or a non-finite value appeared.
    """
    method = Method.parse(method)
    if method is Method.OGDA:
        state = start if isinstance(start, LiftedState) else LiftedState.from_point(start)
        cur = f._vector(state.cur)[None, :]
        prev = f._vector(state.prev)[None, :]
    else:
        if isinstance(start, LiftedState):
            raise MinMaxInputError("GDA takes a single point, not a lifted state")
        cur, prev = f._vector(start)[None, :], None

    rows: Optional[List[np.ndarray]] = [] if trace else None
    codes, steps, finals, final_prevs = _engine(f, cur, prev, cfg, method, rows)

    code = int(codes[0])
    diverged_step = int(steps[0]) if code == DIVERGED else None
    diagnostic = ""
    if code == DIVERGED:
        state = finals[0] if final_prevs is None else np.concatenate([finals[0], final_prevs[0]])
        if np.linalg.norm(state) > cfg.diverge_norm:
            diagnostic = f"state norm exceeded {cfg.diverge_norm:g} at step {diverged_step}"
        else:
            diagnostic = f"non-finite state or gradient at step {diverged_step}; final is the last finite state"

    final = _wrap(f, finals[0], final_prevs[0] if final_prevs is not None else None)

    return TrajectoryResult(
        outcome=_CODE_TO_OUTCOME[code],
        steps_taken=int(steps[0]),
        final=final,
        diverged_step=diverged_step,
        diagnostic=diagnostic,
        trace=rows,
    )


def _wrap(f: MinMaxFunction, cur: np.ndarray, prev: Optional[np.ndarray]) -> Union[PointXY, LiftedState]:
    point = PointXY.from_vector(cur, f.n)
    if prev is None:
        return point
    return LiftedState(cur=point, prev=PointXY.from_vector(prev, f.n))


# --- export ---

def trajectory_csv(f: MinMaxFunction, result: TrajectoryResult, method: Union[str, Method], comments: Optional[dict] = None) -> str:
    """
    Renders a traced trajectory as CSV.

    Header: t,x1..xn,y1..ym (OGDA adds px1..pxn,py1..pym for the memory slot).
    Comment lines ("# key: value") carry the config and the final outcome.
    """
    method = Method.parse(method)
    if result.trace is None:
        raise MinMaxInputError("trajectory was run without trace=True")
    header = ["t"] + [f"x{i + 1}" for i in range(f.n)] + [f"y{j + 1}" for j in range(f.m)]
    if method is Method.OGDA:
        header += [f"px{i + 1}" for i in range(f.n)] + [f"py{j + 1}" for j in range(f.m)]

    buf = io.StringIO()
    for key, value in (comments or {}).items():
        buf.write(f"# {key}: {value}\n")
    buf.write(f"# outcome: {result.outcome.value}\n")
    buf.write(f"# steps_taken: {result.steps_taken}\n")
    if result.diagnostic:
        buf.write(f"# diagnostic: {result.diagnostic}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for t, row in enumerate(result.trace):
        writer.writerow([t] + [repr(float(v)) for v in row])
    return buf.getvalue()
