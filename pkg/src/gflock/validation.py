"""
Input validation utilities for gflock documents.

These helpers check the shape of parsed JSON (scenario files, rule files,
stored reports) before anything is built from it, so malformed input fails
early with the path of the offending field.
"""

import math
from typing import Any, Dict, Iterable, Mapping

from .exceptions import ParseError
from .geometry import Vec2


def require_object(value: Any, path: str) -> Dict[str, Any]:
    """
    Check that ``value`` is a JSON object.

    Raises:
        ParseError: If ``value`` is not a dict

    Examples:
        >>> require_object({"a": 1}, "scenario")  # OK
        >>> require_object([1, 2], "scenario")  # Raises ParseError
    """
    if not isinstance(value, dict):
        raise ParseError(f"expected an object, got {type(value).__name__}", path)
    return value


def require_keys(obj: Mapping[str, Any], keys: Iterable[str], path: str) -> None:
    """Raise a ParseError naming the first missing key."""
    for key in keys:
        if key not in obj:
            raise ParseError("missing key", f"{path}.{key}")


def require_number(value: Any, path: str) -> float:
    """
    Check that ``value`` is a finite JSON number and return it as float.

    Booleans are rejected even though Python treats them as ints.
    """
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("expected a number", path, repr(value))
    result = float(value)
    if not math.isfinite(result):
        raise ParseError("expected a finite number", path, repr(value))
    return result


def require_point(value: Any, path: str) -> Vec2:
    """Check that ``value`` is a two-element ``[x, y]`` array."""
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError("expected an [x, y] pair", path, repr(value))
    return Vec2(require_number(value[0], f"{path}[0]"), require_number(value[1], f"{path}[1]"))


def validate_report_document(document: Any, fields: Iterable[str]) -> Dict[str, float]:
    """
    Check a stored metrics report: an object holding exactly ``fields``, each
    a finite number.

    Raises:
        ParseError: On missing, extra, or non-numeric fields
    """
    obj = require_object(document, "report")
    expected = list(fields)
    extra = sorted(set(obj) - set(expected))
    if extra:
        raise ParseError("unexpected report field", f"report.{extra[0]}")
    require_keys(obj, expected, "report")
    return {name: require_number(obj[name], f"report.{name}") for name in expected}


__all__ = [
    "require_keys",
    "require_number",
    "require_object",
    "require_point",
    "validate_report_document",
]
