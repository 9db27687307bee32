"""Tests for validation functions."""

import pytest

from gflock.exceptions import ConfigError, ParseError
from gflock.geometry import Vec2
from gflock.validation import (
    require_keys,
    require_number,
    require_object,
    require_point,
    validate_report_document,
)

FIELDS = ("aggregation", "fitness")


class TestShapeChecks:
    """Tests for the primitive JSON shape checks."""

    def test_object_passes_through(self):
        document = {"a": 1}
        assert require_object(document, "scenario") is document

    def test_non_object_raises(self):
        with pytest.raises(ParseError) as excinfo:
            require_object([1, 2], "scenario")
        assert excinfo.value.field_path == "scenario"
        assert "list" in str(excinfo.value)

    def test_missing_key_names_path(self):
        with pytest.raises(ParseError) as excinfo:
            require_keys({"bounds": []}, ["bounds", "target"], "scenario")
        assert excinfo.value.field_path == "scenario.target"

    def test_parse_error_is_config_error(self):
        """The CLI maps both to the same exit status."""
        with pytest.raises(ConfigError):
            require_object("x", "rules")


class TestNumbers:
    def test_int_becomes_float(self):
        value = require_number(3, "target.radius")
        assert value == 3.0
        assert isinstance(value, float)

    @pytest.mark.parametrize("bad", [True, "1.0", None, [1.0]])
    def test_non_numbers_rejected(self, bad):
        with pytest.raises(ParseError) as excinfo:
            require_number(bad, "target.radius")
        assert excinfo.value.field_path == "target.radius"

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ParseError, match="finite"):
            require_number(bad, "dt")

    def test_point(self):
        assert require_point([1, 2.5], "target.center") == Vec2(1.0, 2.5)

    def test_point_component_path(self):
        with pytest.raises(ParseError) as excinfo:
            require_point([1, "y"], "target.center")
        assert excinfo.value.field_path == "target.center[1]"

    @pytest.mark.parametrize("bad", [[1], [1, 2, 3], {"x": 1, "y": 2}, 4.0])
    def test_point_shape(self, bad):
        with pytest.raises(ParseError):
            require_point(bad, "spawn.min")


class TestReportDocument:
    def test_valid(self):
        assert validate_report_document({"aggregation": 1, "fitness": 0.5}, FIELDS) == {
            "aggregation": 1.0,
            "fitness": 0.5,
        }

    def test_extra_field(self):
        with pytest.raises(ParseError) as excinfo:
            validate_report_document({"aggregation": 1, "fitness": 0.5, "zeta": 0}, FIELDS)
        assert excinfo.value.field_path == "report.zeta"

    def test_missing_field(self):
        with pytest.raises(ParseError) as excinfo:
            validate_report_document({"aggregation": 1}, FIELDS)
        assert excinfo.value.field_path == "report.fitness"

    def test_non_numeric_field(self):
        with pytest.raises(ParseError) as excinfo:
            validate_report_document({"aggregation": "high", "fitness": 0.5}, FIELDS)
        assert excinfo.value.field_path == "report.aggregation"
