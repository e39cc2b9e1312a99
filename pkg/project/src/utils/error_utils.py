"""
Error handling utilities for standardized error responses and exit handling.

This module defines the exception types raised by the numerical library,
the dict responses returned by tools, and the exit-code contract of the CLI.
"""

import sys
from typing import Dict, Optional


# CLI exit codes (stable contract for CI)
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CONSISTENCY_ERROR = 2
EXIT_PROPERTY_FAILURE = 3

_EXIT_CODES = {
    "input": EXIT_INPUT_ERROR,
    "consistency": EXIT_CONSISTENCY_ERROR,
    "property": EXIT_PROPERTY_FAILURE,
}


class MinMaxInputError(ValueError):
    """Raised when an input (function, point, box, flag) is invalid."""
    kind = "input"


class ConsistencyError(RuntimeError):
    """Raised when two independent computations that must agree do not."""
    kind = "consistency"


class PropertyFailure(AssertionError):
    """Raised when a checked mathematical property is violated."""
    kind = "property"


def create_error_response(message: str, details: Optional[Dict] = None) -> Dict:
    """
    Creates a standardized error response dictionary.

    Args:
        message: Error message describing what went wrong
        details: Optional dictionary with additional error details

    Returns:
        dict: {
            "success": False,
            "error": str,
            "details": dict (if provided)
        }
    """
    response = {
        "success": False,
        "error": message
    }

    if details:
        response["details"] = details

    return response


def create_success_response(data: Optional[Dict] = None) -> Dict:
    """
    Creates a standardized success response dictionary.

    Args:
        data: Optional dictionary with response data

    Returns:
        dict: {
            "success": True,
            ...data fields
        }
    """
    response = {"success": True}

    if data:
        response.update(data)

    return response


def error_response_from_exception(component: str, exc: Exception) -> Dict:
    """
    Converts a library exception into an error response carrying its kind.

    Exceptions without a `kind` attribute count as consistency errors.
    """
    kind = getattr(exc, "kind", "consistency")
    return create_error_response(
        format_error_message(component, str(exc)),
        details={"kind": kind, "exception": type(exc).__name__},
    )


def exit_code_for(response: Dict) -> int:
    """Returns the CLI exit code matching a tool response."""
    if response.get("success"):
        return EXIT_OK
    kind = (response.get("details") or {}).get("kind", "input")
    return _EXIT_CODES.get(kind, EXIT_INPUT_ERROR)


def format_error_message(component: str, issue: str, solution: str = None) -> str:
    """
    Formats an error message with consistent structure.

    Args:
        component: Component or function where error occurred
        issue: Description of what went wrong
        solution: Optional suggestion for how to fix the issue

    Returns:
        str: Formatted error message
    """
    message = f"[{component}] - {issue}"

    if solution:
        message += f"\nSolution: {solution}"

    return message


def print_diagnostic(component: str, message: str, always: bool = False) -> None:
    """
    Writes a one-line diagnostic to stderr.

    Progress lines are shown only when MINMAX_VERBOSE is set; warnings pass
    always=True so they are never swallowed.
    """
    # Local import: env_utils imports path_utils, which must not import us back
    from project.src.utils.env_utils import is_verbose

    if not (always or is_verbose()):
        return
    sys.stderr.write(f"[{component}] {message}\n")
    sys.stderr.flush()
