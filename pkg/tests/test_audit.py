"""Tests for EvolutionAuditLogger and RunMetrics."""

import json
import time
from datetime import datetime

from gflock.audit import EvolutionAuditLogger, RunMetrics


class TestEvolutionAuditLogger:
    def test_records_generations(self):
        audit = EvolutionAuditLogger()
        audit.record_generation(0, best=2.5, mean=3.0, evaluations=20)
        audit.record_generation(1, best=2.0, mean=2.8, evaluations=16, cache_hits=4, elapsed_ms=1.5)

        entries = audit.get_entries()
        assert len(entries) == 2
        assert isinstance(entries[0].timestamp, datetime)
        assert entries[1].cache_hits == 4
        assert audit.best_series() == [2.5, 2.0]
        assert audit.get_entries(limit=1) == [entries[1]]

    def test_disabled_records_nothing(self):
        audit = EvolutionAuditLogger(enabled=False)
        audit.record_generation(0, best=1.0, mean=1.0, evaluations=1)
        assert audit.get_entries() == []

    def test_echo_receives_one_line_per_generation(self):
        lines = []
        audit = EvolutionAuditLogger(echo=lines.append)
        audit.record_generation(3, best=0.125, mean=0.5, evaluations=8)
        assert lines == ["generation 3: best 0.125 mean 0.5"]

    def test_to_json(self):
        audit = EvolutionAuditLogger()
        audit.record_generation(0, best=1.0, mean=2.0, evaluations=4, degenerate=1)
        document = json.loads(audit.to_json())
        assert document[0]["generation"] == 0
        assert document[0]["degenerate"] == 1
        assert "timestamp" in document[0]

    def test_clear(self):
        audit = EvolutionAuditLogger()
        audit.record_generation(0, best=1.0, mean=2.0, evaluations=4)
        audit.metrics.increment("episodes_run", 5)
        audit.clear()
        assert audit.get_entries() == []
        assert audit.metrics.counters["episodes_run"] == 0


class TestRunMetrics:
    def test_increment(self):
        metrics = RunMetrics()
        metrics.increment("agents_died")
        metrics.increment("agents_arrived", 7)
        metrics.increment("no_such_counter")
        assert metrics.counters["agents_died"] == 1
        assert metrics.counters["agents_arrived"] == 7
        assert "no_such_counter" not in metrics.counters

    def test_get_stats(self):
        metrics = RunMetrics()
        time.sleep(0.01)
        stats = metrics.get_stats()
        assert stats["uptime_seconds"] > 0
        assert stats["counters"]["episodes_run"] == 0
        assert "last_updated" in stats

    def test_reset(self):
        metrics = RunMetrics()
        metrics.increment("cache_hits", 3)
        metrics.reset()
        assert metrics.counters["cache_hits"] == 0
