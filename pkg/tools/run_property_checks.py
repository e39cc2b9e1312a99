"""
Tool for running the numerical property suite against an objective.
"""

import json
from typing import Dict, List, Optional, Sequence

from project.src.function_model import Box
from project.src.property_checks import PropertyContext, results_to_text, run_property_suite
from project.src.utils.env_utils import get_default_seed
from project.src.utils.error_utils import (
    create_error_response,
    create_success_response,
    error_response_from_exception,
)
from project.src.workflow_parser import parse_property_suite
from tools.load_function import resolve_function


def run_property_checks(
    source: str,
    alpha: float = 0.001,
    box: Optional[Sequence[Sequence[float]]] = None,
    seed: Optional[int] = None,
    properties: Optional[List[str]] = None,
    suite_path: Optional[str] = None,
    output_format: str = "md",
) -> Dict:
    """
    Runs the property suite and reports pass/fail per property.

    Args:
        source: Builtin name or function file path
        alpha: Step size used by the Jacobian-based properties
        box: Sampling box as (lo, hi) pairs (default [-5, 5] on every axis)
        seed: RNG seed (default: MINMAX_SEED)
        properties: Run only these properties (default: the whole suite)
        suite_path: Alternative suite YAML (default: workflows/property_checks.yaml)
        output_format: "md" (plain pass/fail lines) or "json"

    Returns:
        dict: {
            "success": bool (False if any property failed),
            "results": list of PropertyResult dicts,
            "content": str,
            "error": str (if success=False),
            "details": {"kind": "property", ...} on property failure
        }
    """
    try:
        seed = get_default_seed() if seed is None else seed
        f = resolve_function(source, seed)
        suite = parse_property_suite(suite_path)
        if properties:
            suite = suite.only(list(properties))
        ctx = PropertyContext(f=f, alpha=alpha, box=Box.from_bounds(box, f.dim), seed=seed)
        results = run_property_suite(ctx, suite)
    except Exception as e:
        return error_response_from_exception("run_property_checks", e)

    result_dicts = [r.to_dict() for r in results]
    if output_format == "json":
        content = json.dumps({"function": f.display_name(), "results": result_dicts}, indent=2) + "\n"
    else:
        content = results_to_text(results)

    failed = [r.name for r in results if not r.passed]
    if failed:
        response = create_error_response(
            f"[run_property_checks] - {len(failed)} of {len(results)} properties failed: {', '.join(failed)}",
            details={"kind": "property", "failed": failed},
        )
        response.update({"results": result_dicts, "content": content})
        return response
    return create_success_response({"results": result_dicts, "content": content})
