"""Instance files (versioned JSON) and trace files (JSON lines)."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import TextIO

from .engine import EVENT_KINDS, SimulationTrace, TraceEvent
from .model import Instance, Job

FORMAT_VERSION = 1


class MalformedInput(ValueError):
    pass


def instance_to_dict(instance: Instance) -> dict:
    return {
        "version": FORMAT_VERSION,
        "jobs": [{"id": j.id, "r": j.release, "p": j.proc, "d": j.deadline} for j in instance.jobs],
    }


def dumps_instance(instance: Instance) -> str:
    """One job per line so instance files diff cleanly."""
    rows = [json.dumps(job, separators=(",", ":")) for job in instance_to_dict(instance)["jobs"]]
    if not rows:
        return '{"version":%d,"jobs":[]}\n' % FORMAT_VERSION
    return '{"version":%d,"jobs":[\n %s\n]}\n' % (FORMAT_VERSION, ",\n ".join(rows))


def loads_instance(text: str) -> Instance:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"instance is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("version") != FORMAT_VERSION or not isinstance(raw.get("jobs"), list):
        raise MalformedInput("expected {\"version\": 1, \"jobs\": [...]}")
    try:
        jobs = [Job(int(row["id"]), int(row["r"]), int(row["p"]), int(row["d"])) for row in raw["jobs"]]
        return Instance(jobs)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad job record: {exc}") from exc


def read_instance(path: str | Path) -> Instance:
    return loads_instance(Path(path).read_text())


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_instance(path: str | Path, instance: Instance) -> None:
    write_text_atomic(path, dumps_instance(instance))


def loads_trace(text: str) -> SimulationTrace:
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            event = TraceEvent.from_dict(raw)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise MalformedInput(f"trace line {lineno}: {exc}") from exc
        if event.kind not in EVENT_KINDS:
            raise MalformedInput(f"trace line {lineno}: unknown kind {event.kind!r}")
        events.append(event)
    if text and not text.endswith("\n"):
        raise MalformedInput("trace file is truncated (no trailing newline)")
    return SimulationTrace(events)


def read_trace(path: str | Path) -> SimulationTrace:
    return loads_trace(Path(path).read_text())


class JsonlSink:
    """Callable trace sink writing one event per line."""

    def __init__(self, fh: TextIO):
        self.fh = fh

    def __call__(self, event: TraceEvent) -> None:
        self.fh.write(event.to_json() + "\n")
