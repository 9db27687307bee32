"""
Custom exceptions for the gflock flocking simulator and optimizer.

This module provides a hierarchy of exceptions that make it easy to handle
the different failure modes of configuration loading, simulation, metric
computation, and checkpointing.
"""

from typing import Optional


class GflockException(Exception):  # noqa: N818
    """
    Base exception for all gflock-related errors.

    All custom exceptions in gflock inherit from this class, making it easy
    to catch every gflock-specific error with a single except clause.

    Attributes:
        field_path: Optional dotted path of the offending document field
        context: Optional short description of the offending value
    """

    def __init__(
        self,
        message: str,
        field_path: Optional[str] = None,
        context: Optional[str] = None,
    ):
        """
        Initialize exception with enhanced error context.

        Args:
            message: Error message
            field_path: Path of the field that triggered the error (e.g. ``zones.R0``)
            context: Offending value or surrounding text
        """
        self.field_path = field_path
        self.context = context

        enhanced_message = message
        if field_path:
            enhanced_message = f"{field_path}: {message}"
        if context:
            enhanced_message += f"\n  Context: {context!r}"

        super().__init__(enhanced_message)


class ConfigError(GflockException):
    """
    Raised when a configuration violates one of its invariants.

    Examples:
        - ZoneConfig with R0 >= R1
        - Scenario whose spawn rectangle overlaps an obstacle
        - GAConfig with N_s >= N_p
    """

    pass


class ParseError(ConfigError):
    """
    Raised when a structured document (scenario, rules, checkpoint metadata)
    is malformed: missing keys, wrong types, non-numeric values.
    """

    pass


class DegenerateInputError(GflockException):
    """
    Raised when a computation receives input it cannot give a meaning to.

    Examples:
        - centroid of an empty position list
        - heading deviation when every velocity is zero
        - an alignment neighbour with zero speed (simulator bug)
    """

    pass


class InsideObstacleError(GflockException):
    """
    Raised by nearest-point queries whose query point lies inside an obstacle.

    The simulator treats this as a death rather than an error.
    """

    pass


class ContractError(GflockException):
    """Raised when an operation is called with its pre-condition violated."""

    pass


class CheckpointError(GflockException):
    """Base class for checkpoint load failures."""

    pass


class CheckpointIntegrityError(CheckpointError):
    """Raised when a checkpoint file is truncated, corrupt, or fails its hash."""

    pass


class CheckpointCompatibilityError(CheckpointError):
    """Raised when a checkpoint was written under a different config digest."""

    pass


class ReplayMismatchError(GflockException):
    """
    Raised when a metric recomputed from exported artifacts drifts from the
    stored report. ``metric`` names the first divergent field.
    """

    def __init__(self, message: str, metric: str, context: Optional[str] = None):
        self.metric = metric
        super().__init__(message, field_path=metric, context=context)


__all__ = [
    "CheckpointCompatibilityError",
    "CheckpointError",
    "CheckpointIntegrityError",
    "ConfigError",
    "ContractError",
    "DegenerateInputError",
    "GflockException",
    "InsideObstacleError",
    "ParseError",
    "ReplayMismatchError",
]
