"""
Path utilities for consistent file and folder path management.

Everything is resolved against the repository root (three levels above this
file), so commands behave the same from any working directory. Also holds
the parser for reference tables kept in readonly_sources_of_truth/.
"""

import os
from typing import Dict, List, Optional


PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
READONLY_DIR = os.path.join(PROJECT_ROOT, "readonly_sources_of_truth")
WORKFLOWS_DIR = os.path.join(PROJECT_ROOT, "workflows")


def get_property_suite_path() -> str:
    """Default property suite: workflows/property_checks.yaml."""
    return os.path.join(WORKFLOWS_DIR, "property_checks.yaml")


def get_reference_table_path(name: str = "composite2d") -> str:
    """
    Returns the absolute path to a reference table in readonly sources.

    Args:
        name: Builtin name the table describes (default: "composite2d")

    Returns:
        str: Path in format "readonly_sources_of_truth/{name}_reference.txt"
    """
    return os.path.join(READONLY_DIR, f"{name}_reference.txt")


def get_env_file_path() -> str:
    return os.path.join(READONLY_DIR, ".env")


def get_project_env_file_path() -> str:
    return os.path.join(PROJECT_ROOT, "project", "src", ".env")


def resolve_output_path(output: Optional[str]) -> Optional[str]:
    """
    Resolves a user-given output path to an absolute path.

    Args:
        output: Path from the --out flag, or None / "-" for standard output

    Returns:
        str or None: Absolute path, or None when writing to stdout
    """
    if output is None or output == "-":
        return None
    return os.path.abspath(os.path.expanduser(output))


def looks_like_file_path(source: str) -> bool:
    """
    Decides whether a --fn value names a file rather than a builtin.

    Anything with a path separator or a .json suffix is treated as a file,
    so "missing.json" yields a file error instead of "unknown builtin".
    """
    return source.lower().endswith(".json") or os.sep in source or "/" in source


def parse_reference_table(file_path: str) -> List[Dict]:
    """
    Parses a critical-point reference table.

    Expected format:
        Line 1: header "point|gda_stable|ogda_stable|local_minmax|f_value|prob_gda|prob_ogda"
        Lines 2+: one row per point, e.g. "0,1|NO|NO|NO|0|0|0"
        Lines starting with '#' and empty lines are ignored.

    Args:
        file_path: Absolute path to the reference table

    Returns:
        list: [
            {"point": (float, ...), "gda_stable": bool, "ogda_stable": bool,
             "local_minmax": bool, "f_value": float,
             "prob_gda": float, "prob_ogda": float},
            ...
        ]

    Raises:
        ValueError: If file format is invalid
        FileNotFoundError: If file doesn't exist
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Reference table not found: {file_path}")

    with open(file_path, 'r', encoding='utf-8') as f:
        lines = [line.strip() for line in f.readlines()]

    lines = [line for line in lines if line and not line.startswith("#")]
    if len(lines) < 2:
        raise ValueError("Reference table must have a header and at least one row")

    header = [h.strip() for h in lines[0].split("|")]
    expected = ["point", "gda_stable", "ogda_stable", "local_minmax", "f_value", "prob_gda", "prob_ogda"]
    if header != expected:
        raise ValueError(f"Reference table header must be {'|'.join(expected)}, got: {lines[0]}")

    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != len(expected):
            raise ValueError(f"Row {i} must have {len(expected)} '|'-separated fields: {line}")

        try:
            point = tuple(float(c) for c in parts[0].split(","))
            flags = [_parse_yes_no(p, i) for p in parts[1:4]]
            f_value, prob_gda, prob_ogda = (float(p) for p in parts[4:7])
        except ValueError as e:
            raise ValueError(f"Row {i} is malformed: {e}")

        rows.append({
            "point": point,
            "gda_stable": flags[0],
            "ogda_stable": flags[1],
            "local_minmax": flags[2],
            "f_value": f_value,
            "prob_gda": prob_gda,
            "prob_ogda": prob_ogda,
        })

    return rows


def _parse_yes_no(text: str, row: int) -> bool:
    value = text.upper()
    if value not in ("YES", "NO"):
        raise ValueError(f"expected YES or NO in row {row}, got {text!r}")
    return value == "YES"
