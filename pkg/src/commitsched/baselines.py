"""Reference policies to compare DSC against."""

from __future__ import annotations

from .dsc import DEFAULT_BETA, DSCPolicy
from .engine import ACCEPT_CONTENTION, DECLINE, Decision, Segment, TentativeSchedule
from .model import Job
from .oracle import edf_feasible


def edf_schedule(schedule: TentativeSchedule, job: Job | None, now: int) -> TentativeSchedule:
    """Rebuild the tentative schedule as preemptive EDF over all pending work.

    Ties go to the smaller id. A job that cannot finish is worked on until
    its deadline.
    """
    out = TentativeSchedule(schedule.now)
    out.jobs = dict(schedule.jobs)
    out.executed = dict(schedule.executed)
    if job is not None:
        out.admit(job)
    pending = sorted(
        (j for j in out.jobs.values() if j.deadline > now and out.remaining(j.id) > 0),
        key=lambda j: (j.deadline, j.id),
    )
    ptr = now
    for j in pending:
        stop = min(ptr + out.remaining(j.id), j.deadline)
        if stop > ptr:
            out.push(Segment(j.id, ptr, stop))
            ptr = stop
    return out


def _shrunk(old: TentativeSchedule, new: TentativeSchedule) -> dict[int, int]:
    lost = {}
    for jid in old.jobs:
        delta = old.allocation(jid) - new.allocation(jid)
        if delta > 0:
            lost[jid] = delta
    return lost


class AdmitAllEDF:
    """Accept everything and run earliest-deadline-first."""

    name = "admit-all-edf"

    def decide(self, job: Job, schedule: TentativeSchedule, now: int) -> Decision:
        new = edf_schedule(schedule, job, now)
        return Decision(ACCEPT_CONTENTION, schedule=new, affected=_shrunk(schedule, new))


class FeasibilityGuard:
    """Accept a job only if all admitted work plus it still fits; run EDF.

    Never pays a penalty.
    """

    name = "feasibility-guard"

    def decide(self, job: Job, schedule: TentativeSchedule, now: int) -> Decision:
        residual = [
            Job(j.id, now, schedule.remaining(j.id), j.deadline)
            for j in schedule.jobs.values()
            if schedule.remaining(j.id) > 0
        ]
        if not edf_feasible(residual + [job]):
            return Decision(DECLINE)
        new = edf_schedule(schedule, job, now)
        return Decision(ACCEPT_CONTENTION, schedule=new, affected=_shrunk(schedule, new))


def admit_all_edf_policy() -> AdmitAllEDF:
    return AdmitAllEDF()


def feasibility_guard_policy() -> FeasibilityGuard:
    return FeasibilityGuard()


POLICY_NAMES = ("dsc", "admit-all-edf", "feasibility-guard")


class UnknownPolicy(KeyError):
    pass


def make_policy(name: str, beta: float = DEFAULT_BETA):
    if name == "dsc":
        return DSCPolicy(beta)
    if name == "admit-all-edf":
        return AdmitAllEDF()
    if name == "feasibility-guard":
        return FeasibilityGuard()
    raise UnknownPolicy(name)
