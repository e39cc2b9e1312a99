"""
Tool for exporting one-step displacement fields of 2-D objectives.
"""

import json
from typing import Dict, Optional, Sequence

from project.src.experiments import field_to_csv, vector_field_export
from project.src.function_model import Box
from project.src.utils.error_utils import (
    create_error_response,
    create_success_response,
    error_response_from_exception,
)
from tools.load_function import resolve_function


def export_vector_field(
    source: str,
    grid: int = 50,
    alpha: float = 0.001,
    box: Optional[Sequence[Sequence[float]]] = None,
    method: str = "gda",
    output_format: str = "csv",
) -> Dict:
    """
    Exports (x, y, dx, dy) rows on a grid for quiver plotting.

    Args:
        source: Builtin name or function file path (n = m = 1)
        grid: Points per axis
        alpha: Step size
        box: Region as (lo, hi) pairs (default [-5, 5]^2)
        method: "gda" or "ogda"
        output_format: "csv" or "json"

    Returns:
        dict: {
            "success": bool,
            "rows": int,
            "content": str,
            "error": str (if success=False)
        }
    """
    if output_format not in ("csv", "json"):
        return create_error_response(
            f"field supports --format csv or json, got '{output_format}'",
            details={"kind": "input"},
        )
    try:
        f = resolve_function(source)
        region = Box.from_bounds(box, f.dim)
        rows = vector_field_export(f, region, grid, alpha, method)
        comments = {"function": f.display_name(), "dynamics": method, "alpha": alpha, "grid": grid, **region.to_dict()}
        if output_format == "csv":
            content = field_to_csv(rows, comments)
        else:
            content = json.dumps({**comments, "rows": rows.tolist()}) + "\n"
        return create_success_response({"rows": int(rows.shape[0]), "content": content})
    except Exception as e:
        return error_response_from_exception("export_vector_field", e)
