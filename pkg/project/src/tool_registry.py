"""
Tool registry mapping tool names to Python callables.

Handles lazy imports, parameter validation, and execution.
All tools return Dict with a 'success' field per project convention.
"""

import importlib
from typing import Any, Callable, Dict, List

from project.src.utils.error_utils import create_error_response


TOOL_DEFINITIONS: Dict[str, Dict[str, Any]] = {
    "load_function": {
        "module": "tools.load_function",
        "function": "load_function",
        "params": [
            {"name": "source", "type": "str", "required": True},
            {"name": "seed", "type": "int", "required": False, "default": None},
        ],
    },
    "classify_function": {
        "module": "tools.classify_function",
        "function": "classify_function",
        "params": [
            {"name": "source", "type": "str", "required": True},
            {"name": "alpha", "type": "float", "required": False, "default": 0.001},
            {"name": "box", "type": "list", "required": False, "default": None},
            {"name": "seeds", "type": "int", "required": False, "default": 200},
            {"name": "seed", "type": "int", "required": False, "default": None},
            {"name": "output_format", "type": "str", "required": False, "default": "md"},
        ],
    },
    "trace_dynamics": {
        "module": "tools.trace_dynamics",
        "function": "trace_dynamics",
        "params": [
            {"name": "source", "type": "str", "required": True},
            {"name": "start", "type": "list", "required": True},
            {"name": "method", "type": "str", "required": False, "default": "gda"},
            {"name": "alpha", "type": "float", "required": False, "default": 0.001},
            {"name": "max_iters", "type": "int", "required": False, "default": 500_000},
            {"name": "diverge_norm", "type": "float", "required": False, "default": 1e6},
        ],
    },
    "sweep_basins": {
        "module": "tools.sweep_basins",
        "function": "sweep_basins",
        "params": [
            {"name": "source", "type": "str", "required": True},
            {"name": "method", "type": "str", "required": False, "default": "gda"},
            {"name": "alpha", "type": "float", "required": False, "default": 0.001},
            {"name": "samples", "type": "int", "required": False, "default": 10_000},
            {"name": "seed", "type": "int", "required": False, "default": None},
            {"name": "box", "type": "list", "required": False, "default": None},
            {"name": "max_iters", "type": "int", "required": False, "default": 100_000},
            {"name": "threads", "type": "int", "required": False, "default": None},
            {"name": "output_format", "type": "str", "required": False, "default": "csv"},
        ],
    },
    "export_vector_field": {
        "module": "tools.export_vector_field",
        "function": "export_vector_field",
        "params": [
            {"name": "source", "type": "str", "required": True},
            {"name": "grid", "type": "int", "required": False, "default": 50},
            {"name": "alpha", "type": "float", "required": False, "default": 0.001},
            {"name": "box", "type": "list", "required": False, "default": None},
            {"name": "method", "type": "str", "required": False, "default": "gda"},
            {"name": "output_format", "type": "str", "required": False, "default": "csv"},
        ],
    },
    "run_property_checks": {
        "module": "tools.run_property_checks",
        "function": "run_property_checks",
        "params": [
            {"name": "source", "type": "str", "required": True},
            {"name": "alpha", "type": "float", "required": False, "default": 0.001},
            {"name": "box", "type": "list", "required": False, "default": None},
            {"name": "seed", "type": "int", "required": False, "default": None},
            {"name": "properties", "type": "list", "required": False, "default": None},
            {"name": "suite_path", "type": "str", "required": False, "default": None},
            {"name": "output_format", "type": "str", "required": False, "default": "md"},
        ],
    },
    "save_output": {
        "module": "tools.save_output",
        "function": "save_output",
        "params": [
            {"name": "content", "type": "str", "required": True},
            {"name": "output_path", "type": "str", "required": False, "default": None},
        ],
    },
}

# CLI subcommand -> tool producing its artifact
COMMAND_TOOLS: Dict[str, str] = {
    "classify": "classify_function",
    "trace": "trace_dynamics",
    "sweep": "sweep_basins",
    "field": "export_vector_field",
    "check": "run_property_checks",
}


class ToolRegistry:
    def __init__(self):
        self._cache: Dict[str, Callable] = {}

    def get_tool_info(self) -> List[Dict[str, Any]]:
        """Return name / parameter summaries for every registered tool."""
        return [
            {
                "name": name,
                "params": [
                    {
                        "name": p["name"],
                        "required": p["required"],
                        "default": p.get("default"),
                    }
                    for p in defn["params"]
                ],
            }
            for name, defn in TOOL_DEFINITIONS.items()
        ]

    def execute(self, tool_name: str, params: Dict[str, Any]) -> Dict[str, Any]:
        """
        Execute a tool by name with the given parameters.

        Parameters that are absent or None take the tool's default. Returns
        the tool's Dict result; never raises, errors come back as
        {"success": False, "error": "...", "details": {"kind": ...}}.
        """
        if tool_name not in TOOL_DEFINITIONS:
            return create_error_response(f"Unknown tool: {tool_name}", details={"kind": "input"})

        defn = TOOL_DEFINITIONS[tool_name]
        known = {p["name"] for p in defn["params"]}
        unexpected = sorted(set(params) - known)
        if unexpected:
            return create_error_response(
                f"Unexpected parameter(s) {', '.join(unexpected)} for tool '{tool_name}'",
                details={"kind": "input"},
            )

        # Validate required params
        for p in defn["params"]:
            if p["required"] and params.get(p["name"]) is None:
                return create_error_response(
                    f"Missing required parameter '{p['name']}' for tool '{tool_name}'",
                    details={"kind": "input"},
                )

        # Build call params with defaults
        call_params = {}
        for p in defn["params"]:
            value = params.get(p["name"])
            call_params[p["name"]] = p.get("default") if value is None else value

        # Lazy import and call
        if tool_name not in self._cache:
            try:
                module = importlib.import_module(defn["module"])
                self._cache[tool_name] = getattr(module, defn["function"])
            except Exception as e:
                return create_error_response(
                    f"Failed to import tool '{tool_name}': {e}", details={"kind": "consistency"}
                )

        try:
            return self._cache[tool_name](**call_params)
        except Exception as e:
            return create_error_response(f"Tool execution error: {e}", details={"kind": "consistency"})

    def run_command(self, command: str, params: Dict[str, Any]) -> Dict[str, Any]:
        """Executes the tool behind a CLI subcommand."""
        if command not in COMMAND_TOOLS:
            return create_error_response(f"Unknown command: {command}", details={"kind": "input"})
        return self.execute(COMMAND_TOOLS[command], params)
