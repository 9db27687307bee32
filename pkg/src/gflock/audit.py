"""
Progress and bookkeeping for optimization runs.

``EvolutionAuditLogger`` keeps one entry per GA generation and is the
default progress sink of ``genetic.evolve``. ``RunMetrics`` counts what the
run did (episodes, arrivals, deaths, cache hits).
"""

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class GenerationEntry:
    """Summary of one generation."""

    timestamp: datetime
    generation: int
    best: float
    mean: float
    evaluations: int
    cache_hits: int
    degenerate: int
    elapsed_ms: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "timestamp": self.timestamp.isoformat(),
            "generation": self.generation,
            "best": self.best,
            "mean": self.mean,
            "evaluations": self.evaluations,
            "cache_hits": self.cache_hits,
            "degenerate": self.degenerate,
            "elapsed_ms": self.elapsed_ms,
        }


class RunMetrics:
    """Counters accumulated over an optimization run."""

    def __init__(self) -> None:
        self.counters = {
            "episodes_run": 0,
            "agents_arrived": 0,
            "agents_died": 0,
            "degenerate_evaluations": 0,
            "cache_hits": 0,
        }
        self.start_time = datetime.now(timezone.utc)

    def increment(self, metric: str, count: int = 1) -> None:
        """Increment a counter; unknown names are ignored."""
        if metric in self.counters:
            self.counters[metric] += count

    def get_stats(self) -> Dict[str, Any]:
        uptime = (datetime.now(timezone.utc) - self.start_time).total_seconds()
        return {
            "counters": self.counters.copy(),
            "uptime_seconds": uptime,
            "last_updated": datetime.now(timezone.utc).isoformat(),
        }

    def reset(self) -> None:
        for key in self.counters:
            self.counters[key] = 0
        self.start_time = datetime.now(timezone.utc)


class EvolutionAuditLogger:
    """
    Records per-generation progress of an evolution run.

    Args:
        enabled: When False, nothing is recorded
        echo: Optional callable receiving a one-line progress message per
            generation (the CLI passes a stderr printer)

    Example:
        >>> audit = EvolutionAuditLogger()
        >>> audit.record_generation(0, best=2.5, mean=3.0, evaluations=20)
        >>> audit.best_series()
        [2.5]
    """

    def __init__(self, enabled: bool = True, echo: Optional[Callable[[str], None]] = None):
        self.enabled = enabled
        self.echo = echo
        self.entries: List[GenerationEntry] = []
        self.metrics = RunMetrics()

    def record_generation(
        self,
        generation: int,
        best: float,
        mean: float,
        evaluations: int,
        cache_hits: int = 0,
        degenerate: int = 0,
        elapsed_ms: Optional[float] = None,
    ) -> None:
        if not self.enabled:
            return
        entry = GenerationEntry(
            timestamp=datetime.now(timezone.utc),
            generation=generation,
            best=best,
            mean=mean,
            evaluations=evaluations,
            cache_hits=cache_hits,
            degenerate=degenerate,
            elapsed_ms=elapsed_ms,
        )
        self.entries.append(entry)
        message = f"generation {generation}: best {best:.6g} mean {mean:.6g}"
        logger.info(message)
        if self.echo is not None:
            self.echo(message)

    def get_entries(self, limit: Optional[int] = None) -> List[GenerationEntry]:
        """Most recent ``limit`` entries, or all of them."""
        if limit:
            return self.entries[-limit:]
        return self.entries

    def best_series(self) -> List[float]:
        return [e.best for e in self.entries]

    def clear(self) -> None:
        self.entries.clear()
        self.metrics.reset()

    def to_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.entries], indent=2)


__all__ = ["EvolutionAuditLogger", "GenerationEntry", "RunMetrics"]
