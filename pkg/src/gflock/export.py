"""
CSV and JSON artifacts: writers, readers, and atomic file replacement.

Floats are written with ``repr`` so a log read back from CSV is bit-identical
to the one that was written.
"""

import csv
import hashlib
import io
import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ParseError
from .metrics import anisotropy_series, gamma_series, uniformity_series
from .reporting import MetricsReport
from .scenario import BUILTIN_VERSION, Scenario, build_scenario, describe
from .swarm import AgentStatus
from .validation import require_keys, require_object
from .world import CODE_STATUS, STATUS_CODES, EpisodeLog, Event, EventKind

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRAJECTORY_HEADER = ("step", "agent_id", "x", "y", "vx", "vy", "status")
EVENTS_HEADER = ("step", "agent_id", "event")
HISTORY_HEADER = ("generation", "best", "mean")
LONG_HEADER = ("step", "series", "agent_id", "value")

_STATUS_BY_NAME = {status.value: status for status in AgentStatus}
_EVENT_BY_NAME = {kind.value: kind for kind in EventKind}


def atomic_write_text(path: PathLike, text: str) -> None:
    """Write ``text`` to a temporary sibling file, then rename it over ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_artifacts(files: Mapping[Path, str]) -> None:
    """Write a batch of rendered artifacts, each atomically."""
    for path, text in files.items():
        atomic_write_text(path, text)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_digest(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def trajectory_to_csv(log: EpisodeLog) -> str:
    """One row per agent per step."""
    rows = []
    for t in range(log.n_snapshots):
        for j in range(log.n_total):
            rows.append(
                (
                    t,
                    j,
                    repr(float(log.positions[t, j, 0])),
                    repr(float(log.positions[t, j, 1])),
                    repr(float(log.velocities[t, j, 0])),
                    repr(float(log.velocities[t, j, 1])),
                    CODE_STATUS[int(log.statuses[t, j])].value,
                )
            )
    return _csv(TRAJECTORY_HEADER, rows)


def events_to_csv(log: EpisodeLog) -> str:
    return _csv(EVENTS_HEADER, ((e.step, e.agent_id, e.kind.value) for e in log.events))


def series_to_csv(name: str, series: Sequence[Tuple[int, float]]) -> str:
    """Two-column ``step,<name>`` CSV."""
    return _csv(("step", name), ((t, repr(float(v))) for t, v in series))


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def history_to_csv(history: Sequence[Tuple[int, float, float]]) -> str:
    return _csv(HISTORY_HEADER, ((g, repr(best), repr(mean)) for g, best, mean in history))


def long_format_csv(log: EpisodeLog) -> str:
    """
    Plot-ready long format: per-agent coordinates and velocities plus the
    swarm-level series (``gamma``, ``uniformity``, ``anisotropy``) with an
    empty agent id.
    """
    rows: List[Tuple[Any, ...]] = []
    for t in range(log.n_snapshots):
        for j in range(log.n_total):
            for k, series in enumerate(("x", "y")):
                rows.append((t, series, j, repr(float(log.positions[t, j, k]))))
            for k, series in enumerate(("vx", "vy")):
                rows.append((t, series, j, repr(float(log.velocities[t, j, k]))))
    for name, values in (
        ("gamma", gamma_series(log)),
        ("uniformity", uniformity_series(log)),
        ("anisotropy", anisotropy_series(log)),
    ):
        rows.extend((t, name, "", repr(float(v))) for t, v in values)
    return _csv(LONG_HEADER, rows)


def _rows(text: str, header: Sequence[str], source: str) -> List[List[str]]:
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise ParseError("file is empty", source) from None
    if tuple(first) != tuple(header):
        raise ParseError(f"expected header {','.join(header)}", f"{source}:1", ",".join(first))
    return [row for row in reader if row]


def _int(value: str, path: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError("expected an integer", path, value) from None


def _float(value: str, path: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError("expected a number", path, value) from None


def events_from_statuses(statuses: np.ndarray) -> Tuple[Event, ...]:
    """Rebuild the event list from status transitions between snapshots."""
    events = []
    previous = np.full(statuses.shape[1], STATUS_CODES[AgentStatus.ACTIVE])
    for t in range(statuses.shape[0]):
        for j in np.flatnonzero(statuses[t] != previous):
            status = CODE_STATUS[int(statuses[t, j])]
            kind = EventKind.ARRIVED if status is AgentStatus.ARRIVED else EventKind.DIED
            events.append(Event(t, int(j), kind))
        previous = statuses[t]
    return tuple(events)


def read_events_csv(text: str) -> Tuple[Event, ...]:
    events = []
    for i, row in enumerate(_rows(text, EVENTS_HEADER, "events"), start=2):
        path = f"events:{i}"
        if len(row) != len(EVENTS_HEADER):
            raise ParseError("wrong number of fields", path, ",".join(row))
        if row[2] not in _EVENT_BY_NAME:
            raise ParseError("unknown event", path, row[2])
        events.append(Event(_int(row[0], path), _int(row[1], path), _EVENT_BY_NAME[row[2]]))
    return tuple(events)


def log_from_csv(
    trajectory: str, events: Optional[str], dt: float, max_steps: int
) -> EpisodeLog:
    """
    Rebuild an EpisodeLog from exported CSV text.

    Rows must come step by step with agent ids ``0..N-1`` in order, as
    ``trajectory_to_csv`` writes them. Without an events file the events are
    derived from the status column.

    Raises:
        ParseError: With ``trajectory:<line>`` or ``events:<line>`` paths
    """
    rows = _rows(trajectory, TRAJECTORY_HEADER, "trajectory")
    if not rows:
        raise ParseError("no data rows", "trajectory")
    n_agents = 1 + max(
        _int(row[1] if len(row) > 1 else "", f"trajectory:{i}") for i, row in enumerate(rows, start=2)
    )
    if len(rows) % n_agents:
        raise ParseError("row count is not a multiple of the agent count", "trajectory")
    n_steps = len(rows) // n_agents

    positions = np.empty((n_steps, n_agents, 2), dtype=np.float64)
    velocities = np.empty((n_steps, n_agents, 2), dtype=np.float64)
    statuses = np.empty((n_steps, n_agents), dtype=np.int8)
    for i, row in enumerate(rows):
        path = f"trajectory:{i + 2}"
        if len(row) != len(TRAJECTORY_HEADER):
            raise ParseError("wrong number of fields", path, ",".join(row))
        t, j = divmod(i, n_agents)
        if _int(row[0], path) != t or _int(row[1], path) != j:
            raise ParseError(f"expected step {t} agent {j}", path, ",".join(row[:2]))
        if row[6] not in _STATUS_BY_NAME:
            raise ParseError("unknown status", path, row[6])
        positions[t, j] = (_float(row[2], path), _float(row[3], path))
        velocities[t, j] = (_float(row[4], path), _float(row[5], path))
        statuses[t, j] = STATUS_CODES[_STATUS_BY_NAME[row[6]]]

    parsed_events = read_events_csv(events) if events is not None else events_from_statuses(statuses)
    return EpisodeLog(
        positions=positions,
        velocities=velocities,
        statuses=statuses,
        events=parsed_events,
        dt=dt,
        max_steps=max_steps,
    )


def read_report_json(path: PathLike) -> MetricsReport:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", "report", str(path)) from e
    return MetricsReport.from_dict(document)


class RunRecord(NamedTuple):
    """Provenance of one simulated episode, stored next to its trajectory."""

    seed: int
    scenario: Scenario
    trajectory_sha256: str
    builtin_version: int


def run_to_json(scenario: Scenario, seed: int, trajectory: str) -> str:
    """Sidecar for ``trajectory``: the exact scenario it was simulated in."""
    document = {
        "seed": seed,
        "summary": describe(scenario),
        "builtin_version": BUILTIN_VERSION,
        "trajectory_sha256": sha256_text(trajectory),
        "scenario": scenario.to_dict(),
    }
    return json.dumps(document, indent=2) + "\n"


def run_path_for(trajectory: PathLike) -> Optional[Path]:
    """``trajectory_<tag>.csv`` is described by ``run_<tag>.json`` in the same directory."""
    path = Path(trajectory)
    match = re.fullmatch(r"trajectory_(.+)\.csv", path.name)
    return path.with_name(f"run_{match.group(1)}.json") if match else None


def read_run_json(path: PathLike) -> RunRecord:
    """
    Raises:
        ParseError: Malformed sidecar, with the field path
        ConfigError: The stored scenario violates a constraint
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", "run", str(path)) from e
    doc = require_object(document, "run")
    require_keys(doc, ("seed", "scenario", "trajectory_sha256"), "run")
    seed = doc["seed"]
    version = doc.get("builtin_version", BUILTIN_VERSION)
    for name, value in (("seed", seed), ("builtin_version", version)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError("expected an integer", f"run.{name}", repr(value))
    if version != BUILTIN_VERSION:
        logger.warning(
            "%s was written against builtin layout %r, this is %d", path, version, BUILTIN_VERSION
        )
    return RunRecord(
        seed=seed,
        scenario=build_scenario(doc["scenario"]),
        trajectory_sha256=str(doc["trajectory_sha256"]),
        builtin_version=version,
    )


__all__ = [
    "EVENTS_HEADER",
    "HISTORY_HEADER",
    "LONG_HEADER",
    "RunRecord",
    "TRAJECTORY_HEADER",
    "atomic_write_text",
    "events_from_statuses",
    "events_to_csv",
    "file_digest",
    "history_to_csv",
    "log_from_csv",
    "long_format_csv",
    "read_events_csv",
    "read_report_json",
    "read_run_json",
    "report_to_json",
    "run_path_for",
    "run_to_json",
    "series_to_csv",
    "sha256_text",
    "trajectory_to_csv",
    "write_artifacts",
]
