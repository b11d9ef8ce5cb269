"""Exact offline optimum for small instances.

The clairvoyant scheduler never profits from admitting a job it cannot finish
(value is earned only on completion and shortages are penalties), so the
optimum is the maximum total processing time over preemptively feasible
subsets.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Collection, Iterable, Sequence

from .model import Instance, Job

DEFAULT_LIMIT = 20


class InstanceTooLarge(ValueError):
    pass


class OracleDisagreement(AssertionError):
    pass


@dataclass(frozen=True)
class OracleResult:
    value: int
    witness: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": list(self.witness)}


def edf_feasible(jobs: Iterable[Job]) -> bool:
    """Simulate preemptive EDF; feasible iff nothing finishes late.

    Time jumps between releases and completions, so cost does not depend on
    the tick scale.
    """
    pending = sorted(jobs, key=lambda j: (j.release, j.deadline, j.id))
    n = len(pending)
    if n == 0:
        return True
    heap: list[list[int]] = []
    i = 0
    t = pending[0].release
    while i < n or heap:
        if not heap and pending[i].release > t:
            t = pending[i].release
        while i < n and pending[i].release <= t:
            job = pending[i]
            heapq.heappush(heap, [job.deadline, job.id, job.proc])
            i += 1
        top = heap[0]
        horizon = pending[i].release if i < n else None
        run = top[2] if horizon is None else min(top[2], horizon - t)
        t += run
        top[2] -= run
        if top[2] == 0:
            heapq.heappop(heap)
            if t > top[0]:
                return False
        elif t >= top[0]:
            return False
    return True


def interval_load_feasible(jobs: Iterable[Job]) -> bool:
    """Demand test: every window ``[a, b]`` holds at most ``b - a`` of work from jobs inside it."""
    jobs = list(jobs)
    releases = sorted({j.release for j in jobs})
    deadlines = sorted({j.deadline for j in jobs})
    for a in releases:
        inside = [j for j in jobs if j.release >= a]
        for b in deadlines:
            if b <= a:
                continue
            load = sum(j.proc for j in inside if j.deadline <= b)
            if load > b - a:
                return False
    return True


def feasible(jobs: Collection[Job], cross_check: bool = False) -> bool:
    ok = edf_feasible(jobs)
    if cross_check and ok != interval_load_feasible(jobs):
        raise OracleDisagreement(f"feasibility tests disagree on {sorted(j.id for j in jobs)}")
    return ok


def offline_optimal(instance: Instance | Sequence[Job], limit: int = DEFAULT_LIMIT,
                    cross_check: bool = False) -> OracleResult:
    """Maximum-value feasible subset, ties broken by the smallest sorted id tuple.

    Depth-first include/exclude search; a branch is cut when it is already
    infeasible (feasibility is closed under subsets) or when even taking all
    remaining jobs cannot reach the incumbent value.
    """
    jobs = list(instance.jobs if isinstance(instance, Instance) else instance)
    if len(jobs) > limit:
        raise InstanceTooLarge(f"{len(jobs)} jobs exceeds oracle limit {limit}")
    order = sorted(jobs, key=lambda j: (-j.proc, j.id))
    tail = [0] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        tail[k] = tail[k + 1] + order[k].proc

    best_value = 0
    best_witness: tuple[int, ...] = ()
    chosen: list[Job] = []

    def visit(k: int, value: int) -> None:
        nonlocal best_value, best_witness
        if value + tail[k] < best_value:
            return
        if k == len(order):
            witness = tuple(sorted(j.id for j in chosen))
            if value > best_value or (value == best_value and witness < best_witness):
                best_value, best_witness = value, witness
            return
        job = order[k]
        chosen.append(job)
        if feasible(chosen, cross_check):
            visit(k + 1, value + job.proc)
        chosen.pop()
        visit(k + 1, value)

    visit(0, 0)
    return OracleResult(best_value, best_witness)
