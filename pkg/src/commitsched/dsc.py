"""Threshold admission with tight contention scheduling (DSC)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import (
    ACCEPT_APPEND,
    ACCEPT_CONTENTION,
    DECLINE,
    Decision,
    PreconditionViolated,
    TentativeSchedule,
    contention_insert,
    is_appendable,
)
from .model import Job

DEFAULT_BETA = 1 + math.sqrt(2)
DEFAULT_BETA_STR = "2.41421356237309515"


class Appendable(PreconditionViolated):
    """Quoting only makes sense for jobs that cannot be appended."""


@dataclass(frozen=True)
class DscConfig:
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not (1 < self.beta <= 3):
            raise ValueError(f"beta must lie in (1, 3], got {self.beta}")

    @property
    def threshold_multiplier(self) -> float:
        return 1 + self.beta


@dataclass(frozen=True)
class ProfitQuote:
    profit_accept: int
    profit_decline: int
    affected: dict
    schedule: TentativeSchedule


def quote(job: Job, schedule: TentativeSchedule, now: int) -> ProfitQuote:
    """Price accepting vs. declining a job that does not fit at the tail.

    Declining keeps the affected jobs as they are: those slated to complete
    contribute their value, and every affected job contributes minus its
    current shortage. Accepting earns the new job's value minus the extra
    shortage the displacement causes.
    """
    if is_appendable(job, schedule, now):
        raise Appendable(f"job {job.id} is appendable")
    virtual, affected = contention_insert(job, schedule, now)
    decline = 0
    for jid in affected:
        short = schedule.shortage(jid)
        if short == 0:
            decline += schedule.jobs[jid].value
        decline -= short
    accept = job.value - sum(virtual.shortage(jid) - schedule.shortage(jid) for jid in affected)
    return ProfitQuote(accept, decline, affected, virtual)


def dsc_decide(job: Job, schedule: TentativeSchedule, now: int, config: DscConfig = DscConfig()) -> Decision:
    if is_appendable(job, schedule, now):
        return Decision(ACCEPT_APPEND)
    q = quote(job, schedule, now)
    if q.profit_accept > config.threshold_multiplier * q.profit_decline:
        return Decision(ACCEPT_CONTENTION, schedule=q.schedule, affected=q.affected,
                        profit_accept=q.profit_accept, profit_decline=q.profit_decline)
    return Decision(DECLINE, profit_accept=q.profit_accept, profit_decline=q.profit_decline)


class DSCPolicy:
    """Online policy wrapper around :func:`dsc_decide`."""

    name = "dsc"

    def __init__(self, beta: float = DEFAULT_BETA):
        self.config = DscConfig(beta)

    @property
    def beta(self) -> float:
        return self.config.beta

    def decide(self, job: Job, schedule: TentativeSchedule, now: int) -> Decision:
        return dsc_decide(job, schedule, now, self.config)

    def __repr__(self) -> str:
        return f"DSCPolicy(beta={self.beta!r})"
