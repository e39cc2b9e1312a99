"""
Tool for Monte Carlo basin sweeps with the unstable-point avoidance check.
"""

import json
from typing import Dict, Optional, Sequence

from project.src.classify import full_report
from project.src.dynamics import Method, StepConfig
from project.src.experiments import SWEEP_MAX_ITERS, SweepConfig, avoidance_check, basin_sweep, sweep_both
from project.src.function_model import Box
from project.src.utils.env_utils import get_default_seed, get_default_threads
from project.src.utils.error_utils import (
    create_error_response,
    create_success_response,
    error_response_from_exception,
)
from tools.load_function import resolve_function


def sweep_basins(
    source: str,
    method: str = "gda",
    alpha: float = 0.001,
    samples: int = 10_000,
    seed: Optional[int] = None,
    box: Optional[Sequence[Sequence[float]]] = None,
    max_iters: int = SWEEP_MAX_ITERS,
    threads: Optional[int] = None,
    output_format: str = "csv",
) -> Dict:
    """
    Classifies the critical points, then estimates their basins of attraction.

    Args:
        source: Builtin name or function file path
        method: "gda", "ogda" or "both"
        alpha: Step size of the sampled trajectories
        samples: Number of uniform starts in the box
        seed: Sampling seed (default: MINMAX_SEED)
        box: Sampling box as (lo, hi) pairs (default [-5, 5] on every axis)
        max_iters: Iteration budget per trajectory
        threads: Worker threads (default: MINMAX_THREADS); results do not depend on it
        output_format: "csv" or "json"

    Returns:
        dict: {
            "success": bool,
            "results": {method: SweepResult dict},
            "avoidance": {method: fraction at points classified Unstable},
            "superset": bool (only for method "both"),
            "content": str,
            "error": str (if success=False)
        }
    """
    if output_format not in ("csv", "json"):
        return create_error_response(
            f"sweep supports --format csv or json, got '{output_format}'",
            details={"kind": "input"},
        )
    try:
        seed = get_default_seed() if seed is None else seed
        threads = get_default_threads() if threads is None else threads
        f = resolve_function(source, seed)
        sample_box = Box.from_bounds(box, f.dim)
        reports = full_report(f, sample_box, alpha, seed=seed)
        if not reports:
            return create_error_response(
                f"no critical points of {f.display_name()} found in the box",
                details={"kind": "input"},
            )
        points = [r.point for r in reports]
        cfg = SweepConfig(
            box=sample_box,
            samples=samples,
            method=Method.GDA if method == "both" else Method.parse(method),
            step=StepConfig(alpha=alpha, max_iters=max_iters),
            seed=seed,
            threads=threads,
        )

        superset = None
        if method == "both":
            gda, ogda, superset = sweep_both(f, points, cfg)
            results = {"gda": gda, "ogda": ogda}
        else:
            results = {cfg.method.value: basin_sweep(f, points, cfg)}

        avoidance = {
            name: avoidance_check(f, cfg.with_method(name), reports, result)
            for name, result in results.items()
        }

        if output_format == "csv":
            content = "".join(
                r.to_csv(label=f.display_name()) + f"# avoidance_fraction: {avoidance[name]!r}\n"
                for name, r in results.items()
            )
        else:
            payload = {
                "function": f.display_name(),
                "results": {name: r.to_dict() for name, r in results.items()},
                "avoidance": avoidance,
            }
            if superset is not None:
                payload["superset"] = superset
            content = json.dumps(payload, indent=2) + "\n"

        response = {
            "results": {name: r.to_dict() for name, r in results.items()},
            "avoidance": avoidance,
            "content": content,
        }
        if superset is not None:
            response["superset"] = superset
        return create_success_response(response)
    except Exception as e:
        return error_response_from_exception("sweep_basins", e)
