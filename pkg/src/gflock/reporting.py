"""Metric reports, model comparison tables, and replay diagnostics."""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .exceptions import ConfigError
from .validation import validate_report_document

REPORT_FIELDS: Tuple[str, ...] = (
    "aggregation",
    "anisotropy",
    "average_time",
    "uniformity",
    "death_rate",
    "stability_variance",
    "fitness",
)

# Row order and labels of the side-by-side comparison table.
TABLE_ROWS: Tuple[Tuple[str, str], ...] = (
    ("aggregation", "Aggregation"),
    ("anisotropy", "Anisotropy"),
    ("average_time", "Averagetime"),
    ("uniformity", "Uniformity"),
    ("death_rate", "Deathrate"),
    ("fitness", "Fitness"),
)


@dataclass(frozen=True)
class MetricsReport:
    """
    The metric vector of one episode (or a seed average of several).

    Attributes:
        aggregation: Time-mean distance to the centroid, world units
        anisotropy: Time-mean heading spread, degrees
        average_time: Mean arrival time of arrivers, seconds
        uniformity: Time-mean nearest-neighbour spacing dispersion
        death_rate: Dead agents over all agents
        stability_variance: Variance of the centroid-distance series
        fitness: Composite fitness, smaller is better
        zero_arrivals: Set when nobody arrived and average_time is the
            worst-case sentinel; not serialized
    """

    aggregation: float
    anisotropy: float
    average_time: float
    uniformity: float
    death_rate: float
    stability_variance: float
    fitness: float
    zero_arrivals: bool = field(default=False, compare=False)

    def validate(self) -> None:
        for name in REPORT_FIELDS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError("metric must be finite", name, repr(value))
            if value < 0:
                raise ConfigError("metric must be >= 0", name, repr(value))
        if self.death_rate > 1:
            raise ConfigError("death rate must lie in [0,1]", "death_rate", repr(self.death_rate))

    def to_dict(self) -> Dict[str, float]:
        """Exactly the seven serialized fields."""
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    @classmethod
    def from_dict(cls, document: Any) -> "MetricsReport":
        return cls(**validate_report_document(document, REPORT_FIELDS))

    def summary(self) -> str:
        lines = [f"  {label:<12} {getattr(self, name):.4f}" for name, label in TABLE_ROWS]
        if self.zero_arrivals:
            lines.append("  (no agent arrived; average time is the worst-case sentinel)")
        return "\n".join(lines)


def first_divergence(
    recomputed: MetricsReport, stored: MetricsReport, tolerance: float = 1e-9
) -> Optional[str]:
    """Name of the first field (in report order) differing by more than ``tolerance``."""
    for name in REPORT_FIELDS:
        if abs(getattr(recomputed, name) - getattr(stored, name)) > tolerance:
            return name
    return None


def average_reports(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Field-wise mean; ``zero_arrivals`` is set only if every report had it."""
    if not reports:
        raise ValueError("cannot average an empty list of reports")
    n = len(reports)
    means = {name: math.fsum(getattr(r, name) for r in reports) / n for name in REPORT_FIELDS}
    return MetricsReport(**means, zero_arrivals=all(r.zero_arrivals for r in reports))


@dataclass
class ComparisonTable:
    """
    Seed-averaged reports of several models at several swarm sizes.

    Columns are ``model x scale``, rows are metrics.

    Example:
        >>> table = ComparisonTable(["baseline", "optimized"], [20, 60])
        >>> table.column_labels()
        ['baseline N=20', 'baseline N=60', 'optimized N=20', 'optimized N=60']
    """

    models: List[str]
    scales: List[int]
    seeds: List[int] = field(default_factory=list)
    cells: Dict[Tuple[str, int], MetricsReport] = field(default_factory=dict)

    def add(self, model: str, scale: int, report: MetricsReport) -> None:
        if model not in self.models or scale not in self.scales:
            raise ValueError(f"unknown column {model!r} at N={scale}")
        self.cells[(model, scale)] = report

    def columns(self) -> List[Tuple[str, int]]:
        return [(m, n) for m in self.models for n in self.scales]

    def column_labels(self) -> List[str]:
        return [f"{m} N={n}" for m, n in self.columns()]

    def rows(self) -> List[Tuple[str, List[float]]]:
        """One row per table metric, values in column order."""
        missing = [c for c in self.columns() if c not in self.cells]
        if missing:
            raise ValueError(f"table is missing {len(missing)} cell(s), first {missing[0]}")
        return [
            (label, [getattr(self.cells[c], name) for c in self.columns()])
            for name, label in TABLE_ROWS
        ]

    def to_dict(self) -> Dict[str, Any]:
        """Convert the table to a dictionary for JSON serialization."""
        return {
            "models": list(self.models),
            "scales": list(self.scales),
            "seeds": list(self.seeds),
            "columns": [
                {"model": m, "agents": n, "report": self.cells[(m, n)].to_dict()}
                for m, n in self.columns()
            ],
        }


@dataclass
class ReplayReport:
    """Outcome of recomputing a report from exported artifacts."""

    recomputed: MetricsReport
    stored: Optional[MetricsReport] = None
    divergent_metric: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.divergent_metric is None

    def summary(self) -> str:
        if self.stored is None:
            return "Recomputed metrics (no stored report to compare):\n" + self.recomputed.summary()
        if self.ok:
            return "Replay matches the stored report.\n" + self.recomputed.summary()
        name = self.divergent_metric or ""
        return (
            f"Replay diverges on {name}: recomputed {getattr(self.recomputed, name)!r}, "
            f"stored {getattr(self.stored, name)!r}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "recomputed": self.recomputed.to_dict(),
            "stored": self.stored.to_dict() if self.stored else None,
            "divergent_metric": self.divergent_metric,
        }


__all__ = [
    "REPORT_FIELDS",
    "TABLE_ROWS",
    "ComparisonTable",
    "MetricsReport",
    "ReplayReport",
    "average_reports",
    "first_divergence",
]
