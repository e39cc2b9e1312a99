"""
Tool for running one GDA/OGDA trajectory and rendering it as CSV.
"""

from typing import Dict, Sequence

from project.src.dynamics import StepConfig, run, trajectory_csv
from project.src.utils.error_utils import create_success_response, error_response_from_exception
from project.src.utils.validation_utils import require_finite, require_length
from tools.load_function import resolve_function


TRACE_MAX_ITERS = 500_000


def trace_dynamics(
    source: str,
    start: Sequence[float],
    method: str = "gda",
    alpha: float = 0.001,
    max_iters: int = TRACE_MAX_ITERS,
    diverge_norm: float = 1e6,
) -> Dict:
    """
    Iterates the chosen dynamics from a start point, recording every state.

    Args:
        source: Builtin name or function file path
        start: Initial point (x1..xn, y1..ym)
        method: "gda" or "ogda"
        alpha: Step size
        max_iters: Iteration budget
        diverge_norm: State norm beyond which the run counts as diverged

    Returns:
        dict: {
            "success": bool,
            "outcome": "converged" | "diverged" | "budget_exhausted",
            "steps_taken": int,
            "final": list of float,
            "content": str (trajectory CSV),
            "error": str (if success=False)
        }
    """
    try:
        f = resolve_function(source)
        z = require_length("start", require_finite("start", list(start)), f.dim)
        cfg = StepConfig(alpha=alpha, max_iters=max_iters, diverge_norm=diverge_norm)
        result = run(f, f.point(z), cfg, method, trace=True)
        comments = {"function": f.display_name(), "dynamics": method, **cfg.to_dict()}
        return create_success_response({
            "outcome": result.outcome.value,
            "steps_taken": result.steps_taken,
            "final": list(result.point.as_tuple()),
            "content": trajectory_csv(f, result, method, comments),
        })
    except Exception as e:
        return error_response_from_exception("trace_dynamics", e)
