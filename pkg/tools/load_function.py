"""
Tool for resolving a --fn value to a min-max objective.

A source is either a builtin catalog name ("f1", "planted10d:7",
"bilinear:1,0;0,1") or a path to a function JSON file.
"""

from typing import Dict, Optional

from project.src.catalog import parse_builtin_spec
from project.src.function_model import MinMaxFunction, load_function_file
from project.src.utils.env_utils import get_default_seed
from project.src.utils.error_utils import create_success_response, error_response_from_exception
from project.src.utils.path_utils import looks_like_file_path


def resolve_function(source: str, seed: Optional[int] = None) -> MinMaxFunction:
    """
    Resolves a source string to a MinMaxFunction.

    Raises:
        MinMaxInputError: unknown builtin, missing or malformed file
    """
    if looks_like_file_path(source):
        return load_function_file(source)
    return parse_builtin_spec(source, default_seed=get_default_seed() if seed is None else seed)


def load_function(source: str, seed: Optional[int] = None) -> Dict:
    """
    Loads an objective from a builtin name or a function file.

    Args:
        source: Builtin name or path to a function JSON file
        seed: Coefficient seed for planted10d (default: MINMAX_SEED)

    Returns:
        dict: {
            "success": bool,
            "function": MinMaxFunction,
            "label": str,
            "n": int,
            "m": int,
            "error": str (if success=False)
        }
    """
    try:
        f = resolve_function(source, seed)
        return create_success_response({
            "function": f,
            "label": f.display_name(),
            "n": f.n,
            "m": f.m,
        })
    except Exception as e:
        return error_response_from_exception("load_function", e)
