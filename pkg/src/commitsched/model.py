"""Jobs, instances and profit bookkeeping.

Time is measured in integer ticks throughout. A job's value always equals its
processing time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence


class ValidationError(ValueError):
    """A job or instance violates a model invariant."""


class DeadlineTooEarly(ValidationError):
    pass


class NonPositiveLength(ValidationError):
    pass


class ValueMismatch(ValidationError):
    pass


class DuplicateJobId(ValidationError):
    pass


class ZeroOfflineValue(ZeroDivisionError):
    """The offline optimum is zero, so the ratio is undefined."""


@dataclass(frozen=True)
class Job:
    """A job ``(release, proc, deadline, value)``.

    ``value`` defaults to ``proc``. Construction does not validate; use
    :func:`validate_job` or build an :class:`Instance`.
    """

    id: int
    release: int
    proc: int
    deadline: int
    value: Optional[int] = None

    def __post_init__(self):
        if self.value is None:
            object.__setattr__(self, "value", self.proc)

    @property
    def is_tight(self) -> bool:
        return self.release + self.proc == self.deadline

    @property
    def laxity(self) -> int:
        return self.deadline - self.release - self.proc


def validate_job(job: Job) -> None:
    """Raise a :class:`ValidationError` subclass if ``job`` is inadmissible."""
    if job.proc < 1:
        raise NonPositiveLength(f"job {job.id}: proc={job.proc} < 1")
    if job.deadline < job.release + job.proc:
        raise DeadlineTooEarly(
            f"job {job.id}: deadline {job.deadline} < release {job.release} + proc {job.proc}"
        )
    if job.value != job.proc:
        raise ValueMismatch(f"job {job.id}: value {job.value} != proc {job.proc}")
    if job.release < 0:
        raise ValidationError(f"job {job.id}: negative release {job.release}")


@dataclass(frozen=True)
class Instance:
    """A finite, validated job sequence ordered by release (stable)."""

    jobs: tuple[Job, ...] = ()

    def __init__(self, jobs: Iterable[Job] = ()):
        jobs = tuple(jobs)
        seen = set()
        for job in jobs:
            validate_job(job)
            if job.id in seen:
                raise DuplicateJobId(f"duplicate job id {job.id}")
            seen.add(job.id)
        object.__setattr__(self, "jobs", tuple(sorted(jobs, key=lambda j: j.release)))

    def __len__(self) -> int:
        return len(self.jobs)

    def __iter__(self):
        return iter(self.jobs)

    def by_id(self) -> dict[int, Job]:
        return {job.id: job for job in self.jobs}

    @property
    def total_work(self) -> int:
        return sum(job.proc for job in self.jobs)

    def prefix(self, k: int) -> "Instance":
        """The first ``k`` jobs in release order."""
        return Instance(self.jobs[:k])


class Status(enum.Enum):
    COMPLETED = "completed"
    FAILED = "failed"
    DECLINED = "declined"


@dataclass(frozen=True)
class JobOutcome:
    status: Status
    executed: int = 0
    shortage: int = 0

    @classmethod
    def completed(cls, proc: int) -> "JobOutcome":
        return cls(Status.COMPLETED, executed=proc)

    @classmethod
    def failed(cls, proc: int, executed: int) -> "JobOutcome":
        return cls(Status.FAILED, executed=executed, shortage=proc - executed)

    @classmethod
    def declined(cls) -> "JobOutcome":
        return cls(Status.DECLINED)

    def check(self, proc: int) -> None:
        if self.status is Status.COMPLETED:
            ok = self.executed == proc and self.shortage == 0
        elif self.status is Status.FAILED:
            ok = self.shortage == proc - self.executed and 1 <= self.shortage <= proc
        else:
            ok = self.executed == 0 and self.shortage == 0
        if not ok:
            raise ValidationError(f"inconsistent outcome {self} for proc={proc}")

    def profit(self, value: int) -> int:
        if self.status is Status.COMPLETED:
            return value
        if self.status is Status.FAILED:
            return -self.shortage
        return 0


@dataclass(frozen=True)
class ProfitLedger:
    """Per-job outcomes; ``profit`` is completed value minus shortages."""

    outcomes: Mapping[int, JobOutcome] = field(default_factory=dict)

    @property
    def profit(self) -> int:
        return profit_of(self)

    def count(self, status: Status) -> int:
        return sum(1 for o in self.outcomes.values() if o.status is status)

    @property
    def total_shortage(self) -> int:
        return sum(o.shortage for o in self.outcomes.values())

    def merged(self, other: "ProfitLedger") -> "ProfitLedger":
        overlap = set(self.outcomes) & set(other.outcomes)
        if overlap:
            raise ValueError(f"ledgers share job ids {sorted(overlap)}")
        return ProfitLedger({**self.outcomes, **other.outcomes})

    def summary(self) -> dict:
        return {
            "profit": self.profit,
            "completed": self.count(Status.COMPLETED),
            "failed": self.count(Status.FAILED),
            "declined": self.count(Status.DECLINED),
            "totalShortage": self.total_shortage,
        }


def profit_of(ledger: ProfitLedger) -> int:
    # value == executed for completed jobs under the proportional model
    total = 0
    for outcome in ledger.outcomes.values():
        if outcome.status is Status.COMPLETED:
            total += outcome.executed
        elif outcome.status is Status.FAILED:
            total -= outcome.shortage
    return total


def empirical_ratio(online_profit: int, offline_value: int) -> float:
    if offline_value == 0:
        raise ZeroOfflineValue("offline value is zero; ratio undefined")
    return online_profit / offline_value


def jobs_from_tuples(rows: Sequence[tuple[int, int, int]], start_id: int = 0) -> list[Job]:
    """Build jobs from ``(release, proc, deadline)`` triples, numbering ids from ``start_id``."""
    return [Job(start_id + i, r, p, d) for i, (r, p, d) in enumerate(rows)]
