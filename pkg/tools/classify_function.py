"""
Tool for classifying every critical point of an objective in a box.
"""

import json
import os
from typing import Dict, List, Optional, Sequence

from project.src.classify import (
    attach_notes,
    full_report,
    reference_discrepancies,
    reports_to_json,
    reports_to_markdown,
)
from project.src.function_model import Box
from project.src.utils.env_utils import get_default_seed
from project.src.utils.error_utils import (
    create_error_response,
    create_success_response,
    error_response_from_exception,
    print_diagnostic,
)
from project.src.utils.path_utils import get_reference_table_path, parse_reference_table
from tools.load_function import resolve_function


def _reference_notes(builtin: Optional[str], reports) -> List[str]:
    """Discrepancy notes against readonly_sources_of_truth/<builtin>_reference.txt, if it exists."""
    if not builtin:
        return []
    path = get_reference_table_path(builtin)
    if not os.path.exists(path):
        return []
    notes = reference_discrepancies(reports, parse_reference_table(path))
    for note in notes:
        print_diagnostic("classify", f"reference discrepancy: {note}", always=True)
    return notes


def classify_function(
    source: str,
    alpha: float = 0.001,
    box: Optional[Sequence[Sequence[float]]] = None,
    seeds: int = 200,
    seed: Optional[int] = None,
    output_format: str = "md",
) -> Dict:
    """
    Finds and classifies the critical points of an objective.

    Args:
        source: Builtin name or function file path
        alpha: Step size for the at-alpha verdicts
        box: Search box as (lo, hi) pairs (default [-5, 5] on every axis)
        seeds: Random Newton starts
        seed: RNG seed (default: MINMAX_SEED)
        output_format: "md" or "json"

    Returns:
        dict: {
            "success": bool,
            "reports": list of StabilityReport dicts,
            "notes": list of str (reference discrepancies),
            "content": str (rendered table or JSON),
            "error": str (if success=False),
            "details": {"kind": "input" | "consistency"} (if success=False)
        }
    """
    if output_format not in ("md", "json"):
        return create_error_response(
            f"classify supports --format md or json, got '{output_format}'",
            details={"kind": "input"},
        )
    try:
        seed = get_default_seed() if seed is None else seed
        f = resolve_function(source, seed)
        search_box = Box.from_bounds(box, f.dim)
        reports = full_report(f, search_box, alpha, seeds=seeds, seed=seed)
        notes = _reference_notes(f.builtin, reports)
        reports = attach_notes(reports, notes)

        if output_format == "md":
            content = f"# Critical points of {f.display_name()}\n\n" + reports_to_markdown(reports, notes)
        else:
            content = json.dumps(
                {"function": f.display_name(), "reports": reports_to_json(reports), "notes": notes}, indent=2
            ) + "\n"

        return create_success_response({
            "reports": reports_to_json(reports),
            "notes": notes,
            "content": content,
        })
    except Exception as e:
        return error_response_from_exception("classify_function", e)
