"""Tentative schedule and the deterministic event loop.

The schedule is a contiguous run of segments starting at ``now``. Policies are
consulted once per release, in release order; between releases the engine
executes the head of the schedule.
"""

from __future__ import annotations

import hashlib
import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Protocol

from .model import Instance, Job, JobOutcome, ProfitLedger


class EngineError(RuntimeError):
    pass


class NotAppendable(EngineError):
    pass


class PreconditionViolated(EngineError):
    pass


class PolicyContractViolation(EngineError):
    pass


@dataclass(frozen=True)
class Segment:
    job_id: int
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


class TentativeSchedule:
    """Future processor allocation for admitted, unfinished jobs.

    Besides the segments the schedule tracks the admitted jobs themselves and
    how much of each has already executed, since both are needed to evaluate
    the effect of a mutation.
    """

    def __init__(self, now: int = 0):
        self.now = now
        self.segments: deque[Segment] = deque()
        self.jobs: dict[int, Job] = {}
        self.executed: dict[int, int] = {}
        self._alloc: dict[int, int] = {}

    def copy(self) -> "TentativeSchedule":
        other = TentativeSchedule(self.now)
        other.segments = deque(self.segments)
        other.jobs = dict(self.jobs)
        other.executed = dict(self.executed)
        other._alloc = dict(self._alloc)
        return other

    @property
    def end(self) -> int:
        return self.segments[-1].end if self.segments else self.now

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def allocation(self, job_id: int) -> int:
        """Future processor time allotted to ``job_id``."""
        return self._alloc.get(job_id, 0)

    def remaining(self, job_id: int) -> int:
        return self.jobs[job_id].proc - self.executed.get(job_id, 0)

    def shortage(self, job_id: int) -> int:
        """Work that will be left undone at the deadline if nothing changes."""
        return self.remaining(job_id) - self.allocation(job_id)

    def completes(self, job_id: int) -> bool:
        return self.shortage(job_id) == 0

    def admit(self, job: Job) -> None:
        self.jobs[job.id] = job
        self.executed.setdefault(job.id, 0)

    def push(self, seg: Segment) -> None:
        """Append ``seg`` at the tail, merging with a same-job tail segment."""
        if seg.end <= seg.start:
            return
        if self.segments and self.segments[-1].job_id == seg.job_id and self.segments[-1].end == seg.start:
            last = self.segments.pop()
            seg = Segment(seg.job_id, last.start, seg.end)
            self._alloc[seg.job_id] -= last.length
        self.segments.append(seg)
        self._alloc[seg.job_id] = self._alloc.get(seg.job_id, 0) + seg.length

    def advance(self, t: int) -> list[Segment]:
        """Execute the schedule head up to time ``t``; return executed pieces."""
        if t < self.now:
            raise EngineError(f"cannot advance backwards from {self.now} to {t}")
        done = []
        while self.segments and self.segments[0].start < t:
            seg = self.segments.popleft()
            stop = min(seg.end, t)
            piece = Segment(seg.job_id, seg.start, stop)
            if stop < seg.end:
                self.segments.appendleft(Segment(seg.job_id, stop, seg.end))
            self._alloc[seg.job_id] -= piece.length
            if not self._alloc[seg.job_id]:
                del self._alloc[seg.job_id]
            self.executed[seg.job_id] += piece.length
            done.append(piece)
        self.now = t
        return done

    def forget(self, job_id: int) -> None:
        """Drop a finished (completed or expired) job from the bookkeeping."""
        if self._alloc.get(job_id):
            raise EngineError(f"job {job_id} still has future allocation")
        self.jobs.pop(job_id, None)
        self.executed.pop(job_id, None)
        self._alloc.pop(job_id, None)

    def validate(self) -> None:
        """Raise :class:`PolicyContractViolation` if any invariant fails."""
        cursor = self.now
        totals: dict[int, int] = {}
        for seg in self.segments:
            if seg.start != cursor or seg.end <= seg.start:
                raise PolicyContractViolation(f"segment {seg} breaks contiguity at {cursor}")
            job = self.jobs.get(seg.job_id)
            if job is None:
                raise PolicyContractViolation(f"segment {seg} for unknown job")
            if seg.end > job.deadline:
                raise PolicyContractViolation(f"segment {seg} extends past deadline {job.deadline}")
            totals[seg.job_id] = totals.get(seg.job_id, 0) + seg.length
            cursor = seg.end
        for jid, total in totals.items():
            if self.executed.get(jid, 0) + total > self.jobs[jid].proc:
                raise PolicyContractViolation(f"job {jid} over-allocated")
        if totals != {k: v for k, v in self._alloc.items() if v}:
            raise PolicyContractViolation("allocation cache out of sync")

    def as_tuples(self) -> list[tuple[int, int, int]]:
        return [(s.job_id, s.start, s.end) for s in self.segments]


def end_of_schedule(schedule: TentativeSchedule, now: int) -> int:
    return schedule.segments[-1].end if schedule.segments else now


def is_appendable(job: Job, schedule: TentativeSchedule, now: int) -> bool:
    return end_of_schedule(schedule, now) + job.proc <= job.deadline


def append(job: Job, schedule: TentativeSchedule, now: int) -> TentativeSchedule:
    """Append ``job`` at the tail of ``schedule`` in place; returns the same object."""
    if not is_appendable(job, schedule, now):
        raise NotAppendable(f"job {job.id} does not fit after {end_of_schedule(schedule, now)}")
    start = end_of_schedule(schedule, now)
    schedule.admit(job)
    schedule.push(Segment(job.id, start, start + job.proc))
    return schedule


def relay(segments: Iterable[Segment], start: int, jobs: dict[int, Job], out: TentativeSchedule) -> int:
    """Lay ``segments`` contiguously from ``start`` into ``out``, truncating each at its job's deadline.

    Returns the end of the laid-out run.
    """
    ptr = start
    for seg in segments:
        stop = min(ptr + seg.length, jobs[seg.job_id].deadline)
        if stop > ptr:
            out.push(Segment(seg.job_id, ptr, stop))
            ptr = stop
    return ptr


def contention_insert(
    job: Job, schedule: TentativeSchedule, now: int
) -> tuple[TentativeSchedule, dict[int, int]]:
    """Tight-schedule ``job`` on ``[d - p, d]`` and push the displaced suffix after it.

    Returns a new schedule and ``{job_id: lost}`` for every job whose future
    allocation shrank. The input schedule is not modified.
    """
    if is_appendable(job, schedule, now):
        raise PreconditionViolated(f"job {job.id} is appendable; use append")
    cut = job.deadline - job.proc
    prefix: list[Segment] = []
    suffix: list[Segment] = []
    for seg in schedule.segments:
        if seg.end <= cut:
            prefix.append(seg)
        elif seg.start >= cut:
            suffix.append(seg)
        else:
            prefix.append(Segment(seg.job_id, seg.start, cut))
            suffix.append(Segment(seg.job_id, cut, seg.end))

    out = TentativeSchedule(schedule.now)
    out.jobs = dict(schedule.jobs)
    out.executed = dict(schedule.executed)
    out.admit(job)
    for seg in prefix:
        out.push(seg)
    prefix_end = prefix[-1].end if prefix else now
    out.push(Segment(job.id, cut, job.deadline))
    # the prefix ends at cut < deadline, so this is always the deadline
    relay(suffix, max(job.deadline, prefix_end), out.jobs, out)

    affected = {}
    for jid in schedule._alloc:
        lost = schedule.allocation(jid) - out.allocation(jid)
        if lost > 0:
            affected[jid] = lost
    return out, affected


# ---------------------------------------------------------------- decisions


ACCEPT_APPEND = "accept_append"
ACCEPT_CONTENTION = "accept_contention"
DECLINE = "decline"


@dataclass(frozen=True)
class Decision:
    """A policy's answer for one released job.

    ``schedule`` is required for ``accept_contention`` and replaces the
    current tentative schedule. ``profit_accept``/``profit_decline`` are
    logged when the policy computed them.
    """

    kind: str
    schedule: Optional[TentativeSchedule] = None
    affected: dict = field(default_factory=dict)
    profit_accept: Optional[int] = None
    profit_decline: Optional[int] = None


class OnlinePolicy(Protocol):
    name: str

    def decide(self, job: Job, schedule: TentativeSchedule, now: int) -> Decision: ...


# -------------------------------------------------------------------- trace

_FIELD_ORDER = ("t", "kind", "job", "start", "end", "affected", "profit_accept", "profit_decline", "shortage")


@dataclass(frozen=True)
class TraceEvent:
    t: int
    kind: str
    job: Optional[int] = None
    start: Optional[int] = None
    end: Optional[int] = None
    affected: Optional[tuple[tuple[int, int], ...]] = None
    profit_accept: Optional[int] = None
    profit_decline: Optional[int] = None
    shortage: Optional[int] = None

    def to_dict(self) -> dict:
        out = {}
        for name in _FIELD_ORDER:
            value = getattr(self, name)
            if value is None:
                continue
            if name == "affected":
                value = [list(pair) for pair in value]
            out[name] = value
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "TraceEvent":
        kwargs = dict(raw)
        if kwargs.get("affected") is not None:
            kwargs["affected"] = tuple((int(a), int(b)) for a, b in kwargs["affected"])
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


EVENT_KINDS = frozenset(
    {"release", ACCEPT_APPEND, ACCEPT_CONTENTION, DECLINE, "execute", "complete", "fail", "idle"}
)


@dataclass
class SimulationTrace:
    events: list[TraceEvent] = field(default_factory=list)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.events)

    def digest(self) -> str:
        return hashlib.sha256(self.to_jsonl().encode()).hexdigest()

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == kind]


# --------------------------------------------------------------- simulator


class Simulator:
    """Drive one policy over one instance.

    ``sink`` receives every event as it is emitted (e.g. a JSON-lines
    writer); the complete trace is kept either way.
    """

    def __init__(self, instance: Instance, policy: OnlinePolicy,
                 sink: Optional[Callable[[TraceEvent], None]] = None, check: bool = False):
        self.instance = instance
        self.policy = policy
        self.sink = sink
        self.check = check
        self.schedule = TentativeSchedule(0)
        self.trace = SimulationTrace()
        self.outcomes: dict[int, JobOutcome] = {}
        self._deadlines: list[tuple[int, int]] = []

    def _emit(self, event: TraceEvent) -> None:
        self.trace.events.append(event)
        if self.sink is not None:
            self.sink(event)

    def _flush_deadlines(self, upto: int, inclusive: bool = True) -> None:
        heap = self._deadlines
        while heap and (heap[0][0] <= upto if inclusive else heap[0][0] < upto):
            deadline, jid = heapq.heappop(heap)
            if jid in self.outcomes:
                continue
            sched = self.schedule
            job = sched.jobs[jid]
            executed = sched.executed[jid]
            sched.forget(jid)
            outcome = JobOutcome.failed(job.proc, executed)
            self.outcomes[jid] = outcome
            self._emit(TraceEvent(deadline, "fail", job=jid, shortage=outcome.shortage))

    def _advance(self, t: int, final: bool = False) -> None:
        sched = self.schedule
        start = sched.now
        while sched.segments and sched.segments[0].start < t:
            (piece,) = sched.advance(min(sched.segments[0].end, t))
            self._flush_deadlines(piece.start)
            self._emit(TraceEvent(piece.start, "execute", job=piece.job_id, start=piece.start, end=piece.end))
            self._flush_deadlines(piece.end, inclusive=False)
            job = sched.jobs[piece.job_id]
            if sched.executed[job.id] == job.proc:
                sched.forget(job.id)
                self.outcomes[job.id] = JobOutcome.completed(job.proc)
                self._emit(TraceEvent(piece.end, "complete", job=job.id))
            start = piece.end
        sched.advance(t)
        if start < t and not final:
            self._flush_deadlines(start)
            self._emit(TraceEvent(start, "idle", start=start, end=t))
        self._flush_deadlines(t)

    def _release(self, job: Job) -> None:
        sched = self.schedule
        now = job.release
        self._emit(TraceEvent(now, "release", job=job.id))
        decision = self.policy.decide(job, sched, now)
        if sched.now != now:
            raise PolicyContractViolation("policy mutated the schedule clock")
        if decision.kind == ACCEPT_APPEND:
            if not is_appendable(job, sched, now):
                raise PolicyContractViolation(f"job {job.id} is not appendable")
            append(job, sched, now)
            self._emit(TraceEvent(now, ACCEPT_APPEND, job=job.id))
        elif decision.kind == ACCEPT_CONTENTION:
            new = decision.schedule
            if new is None or job.id not in new.jobs or new.now != now:
                raise PolicyContractViolation(f"bad contention schedule for job {job.id}")
            self._check_replacement(new)
            self.schedule = new
            self._emit(TraceEvent(
                now, ACCEPT_CONTENTION, job=job.id,
                affected=tuple(sorted(decision.affected.items())),
                profit_accept=decision.profit_accept, profit_decline=decision.profit_decline,
            ))
        elif decision.kind == DECLINE:
            self.outcomes[job.id] = JobOutcome.declined()
            self._emit(TraceEvent(
                now, DECLINE, job=job.id,
                profit_accept=decision.profit_accept, profit_decline=decision.profit_decline,
            ))
            return
        else:
            raise PolicyContractViolation(f"unknown decision kind {decision.kind!r}")
        heapq.heappush(self._deadlines, (job.deadline, job.id))
        if self.check:
            self.schedule.validate()

    def _check_replacement(self, new: TentativeSchedule) -> None:
        try:
            new.validate()
        except PolicyContractViolation:
            raise
        except Exception as exc:  # malformed schedule objects
            raise PolicyContractViolation(str(exc)) from exc
        old = self.schedule
        for jid, job in old.jobs.items():
            if new.jobs.get(jid) != job or new.executed.get(jid) != old.executed[jid]:
                raise PolicyContractViolation(f"policy dropped or rewrote admitted job {jid}")

    def run(self) -> tuple[ProfitLedger, SimulationTrace]:
        for job in self.instance.jobs:
            self._advance(job.release)
            self._release(job)
        horizon = max((j.deadline for j in self.instance.jobs), default=0)
        self._advance(max(horizon, self.schedule.now), final=True)
        if self.schedule.jobs:
            raise EngineError(f"jobs left unresolved: {sorted(self.schedule.jobs)}")
        order = [job.id for job in self.instance.jobs]
        return ProfitLedger({jid: self.outcomes[jid] for jid in order}), self.trace


def run_simulation(instance: Instance, policy: OnlinePolicy,
                   sink: Optional[Callable[[TraceEvent], None]] = None,
                   check: bool = False) -> tuple[ProfitLedger, SimulationTrace]:
    """Run ``policy`` over ``instance``; deterministic in its inputs."""
    return Simulator(instance, policy, sink=sink, check=check).run()
