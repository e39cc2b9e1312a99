"""
Property-suite YAML parser.

Loads workflows/property_checks.yaml and produces a PropertySuite whose
PropertySpec entries the `check` command runs in file order.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from project.src.utils.error_utils import MinMaxInputError
from project.src.utils.path_utils import get_property_suite_path


@dataclass
class PropertySpec:
    """One property to check."""
    name: str
    samples: int = 1
    tolerance: float = 0.0
    description: str = ""
    enabled: bool = True
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class PropertySuite:
    name: str
    description: str = ""
    properties: List[PropertySpec] = field(default_factory=list)

    def names(self) -> List[str]:
        return [p.name for p in self.properties]

    def only(self, names: List[str]) -> "PropertySuite":
        """A copy restricted to the given property names, in suite order."""
        missing = [n for n in names if n not in self.names()]
        if missing:
            raise MinMaxInputError(f"suite '{self.name}' has no properties named {', '.join(missing)}")
        return PropertySuite(self.name, self.description, [p for p in self.properties if p.name in names])


def parse_property_suite(yaml_path: Optional[str] = None) -> PropertySuite:
    """
    Load and parse the property-suite YAML.

    Args:
        yaml_path: Path to the YAML file (default: workflows/property_checks.yaml)

    Returns:
        PropertySuite with properties in file order.

    Raises:
        MinMaxInputError: if the file is missing or malformed
    """
    yaml_path = yaml_path or get_property_suite_path()
    try:
        with open(yaml_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except FileNotFoundError:
        raise MinMaxInputError(f"property suite not found: {yaml_path}")
    except yaml.YAMLError as e:
        raise MinMaxInputError(f"property suite is not valid YAML: {yaml_path} ({e})")

    if not isinstance(raw, dict) or not isinstance(raw.get("properties"), list):
        raise MinMaxInputError(f"property suite must be a mapping with a 'properties' list: {yaml_path}")

    defaults = raw.get("defaults", {}) or {}
    properties = [_parse_property(rp, defaults, i) for i, rp in enumerate(raw["properties"])]
    return PropertySuite(
        name=raw.get("name", "property_checks"),
        description=raw.get("description", ""),
        properties=properties,
    )


def _parse_property(raw: Dict[str, Any], defaults: Dict[str, Any], index: int) -> PropertySpec:
    """Parse a single property dict from YAML, filling missing keys from defaults."""
    if not isinstance(raw, dict) or "name" not in raw:
        raise MinMaxInputError(f"property {index}: must be a mapping with a 'name'")
    try:
        # YAML reads "1e-8" (no dot) as a string, so coerce explicitly
        samples = int(raw.get("samples", defaults.get("samples", 1)))
        tolerance = float(raw.get("tolerance", defaults.get("tolerance", 0.0)))
    except (TypeError, ValueError) as e:
        raise MinMaxInputError(f"property {index} ('{raw['name']}'): bad samples or tolerance ({e})")
    if samples < 1:
        raise MinMaxInputError(f"property {index} ('{raw['name']}'): samples must be >= 1")

    return PropertySpec(
        name=str(raw["name"]),
        samples=samples,
        tolerance=tolerance,
        description=raw.get("description", ""),
        enabled=bool(raw.get("enabled", True)),
        params=raw.get("params", {}) or {},
    )
