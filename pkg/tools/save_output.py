"""
Tool for writing a command's artifact to a file or to standard output.
"""

import os
import sys
from typing import Dict, Optional

from project.src.utils.error_utils import create_error_response, create_success_response
from project.src.utils.path_utils import resolve_output_path


def save_output(content: str, output_path: Optional[str] = None) -> Dict:
    """
    Saves an artifact as UTF-8 text.

    Args:
        content: Rendered artifact (CSV, JSON, Markdown)
        output_path: Target file; None or "-" writes to stdout

    Returns:
        dict: {
            "success": bool,
            "file_path": str or None (None when written to stdout),
            "error": str (if success=False)
        }
    """
    target = resolve_output_path(output_path)
    if target is None:
        sys.stdout.write(content)
        sys.stdout.flush()
        return create_success_response({"file_path": None})

    try:
        folder = os.path.dirname(target)
        if folder and not os.path.isdir(folder):
            return create_error_response(
                f"Output folder does not exist: {folder}",
                details={"kind": "input", "solution": "Create the folder or choose another --out path"},
            )

        with open(target, "w", encoding="utf-8") as f:
            f.write(content)

        return create_success_response({"file_path": target})

    except OSError as e:
        return create_error_response(
            "Failed to save output",
            details={"kind": "input", "error": str(e)},
        )
