"""Post-hoc analysis of simulation traces.

Busy intervals are maximal runs of back-to-back execution. Every job is
attributed to the busy interval containing its release, and the structural
inequalities DSC guarantees are checked per interval.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Sequence

from .engine import ACCEPT_APPEND, ACCEPT_CONTENTION, DECLINE, SimulationTrace, TraceEvent
from .model import Instance

TOL = 1e-9


class MalformedTrace(ValueError):
    pass


class NotADscTrace(MalformedTrace):
    pass


@dataclass(frozen=True)
class BusyInterval:
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start

    def __contains__(self, t: int) -> bool:
        return self.start <= t < self.end


@dataclass
class IntervalProfit:
    interval: BusyInterval
    total: int = 0
    peace: int = 0
    contention: int = 0
    shortages: dict[int, int] = field(default_factory=dict)
    declined: list[tuple[int, int]] = field(default_factory=list)
    failed_peace: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def total_shortage(self) -> int:
        return sum(self.shortages.values())


@dataclass(frozen=True)
class LemmaReport:
    name: str
    violations: tuple[dict, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"lemma": self.name, "passed": self.passed, "violations": list(self.violations)}


def _events(trace) -> Sequence[TraceEvent]:
    return trace.events if isinstance(trace, SimulationTrace) else list(trace)


def busy_intervals(trace) -> list[BusyInterval]:
    out: list[BusyInterval] = []
    last_t = None
    for ev in _events(trace):
        if last_t is not None and ev.t < last_t:
            raise MalformedTrace(f"event at t={ev.t} after t={last_t}")
        last_t = ev.t
        if ev.kind != "execute":
            continue
        if ev.start is None or ev.end is None or ev.end <= ev.start:
            raise MalformedTrace(f"bad execute event {ev}")
        if out and ev.start < out[-1].end:
            raise MalformedTrace(f"execution [{ev.start},{ev.end}) overlaps earlier work")
        if out and ev.start == out[-1].end:
            out[-1] = BusyInterval(out[-1].start, ev.end)
        else:
            out.append(BusyInterval(ev.start, ev.end))
    return out


def _locate(intervals: Sequence[BusyInterval], t: int) -> int | None:
    starts = [b.start for b in intervals]
    k = bisect.bisect_right(starts, t) - 1
    if k >= 0 and t in intervals[k]:
        return k
    return None


def interval_profits(trace, instance: Instance,
                     intervals: Sequence[BusyInterval] | None = None) -> list[IntervalProfit]:
    """Split the run's profit over busy intervals by release, into peace and contention parts."""
    events = _events(trace)
    if intervals is None:
        intervals = busy_intervals(events)
    jobs = instance.by_id()
    released: set[int] = set()
    decision: dict[int, str] = {}
    outcome: dict[int, tuple[str, int]] = {}
    executed: dict[int, int] = {}
    spans: dict[int, tuple[int, int]] = {}

    for ev in events:
        jid = ev.job
        if ev.kind in ("idle", "execute", "complete", "fail", "release") or ev.kind in (
                ACCEPT_APPEND, ACCEPT_CONTENTION, DECLINE):
            if ev.kind != "idle" and jid not in jobs:
                raise MalformedTrace(f"event {ev.kind} for unknown job {jid}")
        else:
            raise MalformedTrace(f"unknown event kind {ev.kind!r}")
        if ev.kind == "release":
            if jid in released:
                raise MalformedTrace(f"job {jid} released twice")
            if ev.t != jobs[jid].release:
                raise MalformedTrace(f"job {jid} released at {ev.t}, expected {jobs[jid].release}")
            released.add(jid)
        elif ev.kind in (ACCEPT_APPEND, ACCEPT_CONTENTION, DECLINE):
            if jid not in released or jid in decision:
                raise MalformedTrace(f"job {jid} decided twice or before release")
            if ev.kind != ACCEPT_APPEND and (ev.profit_accept is None or ev.profit_decline is None):
                raise NotADscTrace(f"decision for job {jid} carries no profit quote")
            decision[jid] = ev.kind
        elif ev.kind == "execute":
            if decision.get(jid) not in (ACCEPT_APPEND, ACCEPT_CONTENTION) or jid in outcome:
                raise MalformedTrace(f"job {jid} executed without being admitted and pending")
            executed[jid] = executed.get(jid, 0) + (ev.end - ev.start)
            lo, hi = spans.get(jid, (ev.start, ev.end))
            spans[jid] = (min(lo, ev.start), max(hi, ev.end))
        elif ev.kind in ("complete", "fail"):
            if decision.get(jid) not in (ACCEPT_APPEND, ACCEPT_CONTENTION) or jid in outcome:
                raise MalformedTrace(f"job {jid} finished twice or without admission")
            outcome[jid] = (ev.kind, ev.shortage or 0)

    for jid, job in jobs.items():
        if jid not in decision:
            raise MalformedTrace(f"job {jid} has no admission decision")
        if decision[jid] == DECLINE:
            continue
        if jid not in outcome:
            raise MalformedTrace(f"admitted job {jid} has no outcome")
        kind, short = outcome[jid]
        done = executed.get(jid, 0)
        if kind == "complete" and done != job.proc:
            raise MalformedTrace(f"job {jid} completed after {done} of {job.proc} ticks")
        if kind == "fail" and (short != job.proc - done or short < 1):
            raise MalformedTrace(f"job {jid} shortage {short} inconsistent with {done} executed")

    rows = [IntervalProfit(b) for b in intervals]
    for jid, job in jobs.items():
        k = _locate(intervals, job.release)
        if k is None:
            raise MalformedTrace(f"job {jid} released outside every busy interval")
        row = rows[k]
        if jid in spans:
            lo, hi = spans[jid]
            if lo < row.interval.start or hi > row.interval.end:
                raise MalformedTrace(f"job {jid} executes outside its release interval")
        kind = decision[jid]
        if kind == DECLINE:
            row.declined.append((jid, job.deadline))
            continue
        status, short = outcome[jid]
        gain = job.value if status == "complete" else -short
        if status == "fail":
            row.shortages[jid] = short
        if kind == ACCEPT_APPEND:
            row.peace += gain
            if status == "fail":
                row.failed_peace.append((jid, job.release, job.deadline))
        else:
            row.contention += gain
        row.total += gain
    return rows


def _report(name: str, violations: list[dict]) -> LemmaReport:
    return LemmaReport(name, tuple(violations))


def check_lemma_capacity(intervals: Sequence[BusyInterval], profits: Sequence[IntervalProfit],
                         beta: float) -> LemmaReport:
    """Busy length is at most total profit plus contention profit over (beta - 1)."""
    bad = []
    for b, row in zip(intervals, profits):
        rhs = row.total + row.contention / (beta - 1)
        if b.length > rhs + TOL * max(1.0, abs(rhs)):
            bad.append({"interval": [b.start, b.end], "lhs": b.length, "rhs": rhs})
    return _report("capacity", bad)


def check_lemma_declined(intervals: Sequence[BusyInterval], profits: Sequence[IntervalProfit],
                         beta: float) -> LemmaReport:
    """A job declined in B has deadline within (1 + beta) T_B plus B's shortages of B's end."""
    bad = []
    for b, row in zip(intervals, profits):
        bound = (1 + beta) * row.total
        for jid, deadline in row.declined:
            lhs = deadline - b.end - row.total_shortage
            if lhs > bound + TOL * max(1.0, abs(bound)):
                bad.append({"interval": [b.start, b.end], "job": jid, "lhs": lhs, "rhs": bound,
                            "margin": lhs - bound})
    return _report("declined", bad)


def check_declined_completed_value(intervals: Sequence[BusyInterval], profits: Sequence[IntervalProfit],
                                   beta: float) -> LemmaReport:
    """Declined deadlines against (1 + beta) times the value completed in B.

    This is the declined-job bound with the shortages moved inside the
    multiplier. Unlike :func:`check_lemma_declined` it also survives
    intervals whose profit is dragged down by failures unrelated to the
    declined job.
    """
    bad = []
    for b, row in zip(intervals, profits):
        bound = (1 + beta) * (row.total + row.total_shortage)
        for jid, deadline in row.declined:
            lhs = deadline - b.end
            if lhs > bound + TOL * max(1.0, abs(bound)):
                bad.append({"interval": [b.start, b.end], "job": jid, "lhs": lhs, "rhs": bound})
    return _report("declined_completed_value", bad)


def check_lemma_peace(profits: Sequence[IntervalProfit], intervals: Sequence[BusyInterval]) -> LemmaReport:
    """Peace-scheduled jobs that failed lie wholly inside the busy union."""
    bad = []
    for row in profits:
        for jid, r, d in row.failed_peace:
            if not covered(intervals, r, d):
                bad.append({"job": jid, "window": [r, d]})
    return _report("peace", bad)


def check_lemma_shortage(intervals: Sequence[BusyInterval], profits: Sequence[IntervalProfit]) -> LemmaReport:
    bad = []
    for b, row in zip(intervals, profits):
        if row.total_shortage > b.length - row.total:
            bad.append({"interval": [b.start, b.end], "lhs": row.total_shortage,
                        "rhs": b.length - row.total})
    return _report("shortage", bad)


def check_declines_while_busy(trace, intervals: Sequence[BusyInterval]) -> LemmaReport:
    """Declines only happen while the processor is busy."""
    bad = []
    for ev in _events(trace):
        if ev.kind == DECLINE and _locate(intervals, ev.t) is None:
            bad.append({"job": ev.job, "t": ev.t})
    return _report("declined_while_busy", bad)


def covered(intervals: Sequence[BusyInterval], lo: int, hi: int) -> bool:
    """Whether ``[lo, hi]`` lies inside the union of ``intervals``."""
    if hi <= lo:
        return _locate(intervals, lo) is not None or any(b.end == lo for b in intervals)
    k = _locate(intervals, lo)
    if k is None:
        return False
    # intervals are maximal, so [lo, hi] must sit in one of them
    return hi <= intervals[k].end


@dataclass(frozen=True)
class TraceAnalysis:
    intervals: list[BusyInterval]
    profits: list[IntervalProfit]
    reports: list[LemmaReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def total(self) -> int:
        return sum(row.total for row in self.profits)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "lemmas": [r.to_dict() for r in self.reports]}


def check_trace(trace, instance: Instance, beta: float) -> TraceAnalysis:
    """Run every structural check on a DSC trace."""
    intervals = busy_intervals(trace)
    profits = interval_profits(trace, instance, intervals)
    reports = [
        check_lemma_capacity(intervals, profits, beta),
        check_lemma_declined(intervals, profits, beta),
        check_lemma_peace(profits, intervals),
        check_lemma_shortage(intervals, profits),
        check_declines_while_busy(trace, intervals),
        check_declined_completed_value(intervals, profits, beta),
    ]
    return TraceAnalysis(intervals, profits, reports)
