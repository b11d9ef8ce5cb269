"""Adversarial chains of tight jobs that cap every online scheduler at 1/c.

Each job is released one epsilon after the previous one and is tight, so
any online scheduler either abandons what it holds or declines. Lengths obey
``x0 = 1, x1 = c, x[n+2] - x[n+1] = c * (x[n+1] - 2 * x[n])`` and the chain
stops at the first ``x[m+1] <= 2 * x[m]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .engine import ACCEPT_APPEND, ACCEPT_CONTENTION, DECLINE, Decision, contention_insert, is_appendable, run_simulation
from .model import Instance, Job
from .oracle import offline_optimal

SQRT2 = math.sqrt(2)
C_SUPREMUM = 3 + 2 * SQRT2
OPTIMAL_RATIO = 3 - 2 * SQRT2
EXHAUSTIVE_MAX_JOBS = 12

Number = Union[Fraction, float]


class AdversaryError(ValueError):
    pass


class NonTerminating(AdversaryError):
    pass


class ScaleTooSmall(AdversaryError):
    pass


class BoundViolated(AssertionError):
    def __init__(self, strategy: int, ratio: float, bound: float):
        super().__init__(f"strategy {strategy} reaches ratio {ratio} > {bound}")
        self.strategy = strategy
        self.ratio = ratio
        self.bound = bound


def _coerce_c(c) -> Number:
    if isinstance(c, (Fraction, int)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    return float(c)


def _below_supremum(c: Number) -> bool:
    if isinstance(c, Fraction):
        # c < 3 + 2*sqrt(2)  <=>  c <= 3 or (c - 3)^2 < 8
        return c <= 3 or (c - 3) ** 2 < 8
    return c < C_SUPREMUM


@dataclass(frozen=True)
class AdversaryParams:
    """``c`` given as int, Fraction or decimal string is handled exactly; floats are not."""

    c: Number
    scale: int = 10**6
    epsilon_ticks: int = 1
    m_max: int = 10_000

    def __post_init__(self):
        c = _coerce_c(self.c)
        object.__setattr__(self, "c", c)
        if not (c > 1 and _below_supremum(c)):
            raise AdversaryError(f"c={self.c} outside (1, 3+2*sqrt(2))")
        if self.scale < 1 or self.epsilon_ticks < 1 or self.m_max < 1:
            raise AdversaryError("scale, epsilon_ticks and m_max must be positive")

    @property
    def exact(self) -> bool:
        return isinstance(self.c, Fraction)


@dataclass(frozen=True)
class AdversarySequence:
    c: Number
    lengths: tuple[Number, ...]
    ratio_terms: tuple[Number, ...]
    final_term: Number

    @property
    def m(self) -> int:
        return len(self.lengths) - 2

    def residuals(self) -> list[Number]:
        x, c = self.lengths, self.c
        return [(x[n + 2] - x[n + 1]) - c * (x[n + 1] - 2 * x[n]) for n in range(len(x) - 2)]


def gen_sequence(params: AdversaryParams) -> AdversarySequence:
    c = params.c
    one = Fraction(1) if params.exact else 1.0
    x = [one, c * one]
    while x[-1] > 2 * x[-2]:
        if len(x) - 1 > params.m_max:
            raise NonTerminating(f"no stopping index within m_max={params.m_max} for c={c}")
        x.append(x[-1] + c * (x[-1] - 2 * x[-2]))
    prefix = 0 * one
    terms = []
    for i in range(len(x) - 1):
        terms.append((x[i] - prefix) / x[i + 1])
        prefix += x[i]
    final = (x[-1] - prefix) / x[-1]
    return AdversarySequence(c, tuple(x), tuple(terms), final)


def gen_instance(params: AdversaryParams, sequence: AdversarySequence | None = None) -> Instance:
    """Tight job ``i`` released at ``i * epsilon`` with ``round(x_i * scale)`` ticks of work."""
    seq = sequence if sequence is not None else gen_sequence(params)
    jobs = []
    for i, x in enumerate(seq.lengths):
        proc = round(x * params.scale)
        if proc < 1:
            raise ScaleTooSmall(f"x_{i}={x} rounds to 0 ticks at scale {params.scale}")
        release = i * params.epsilon_ticks
        jobs.append(Job(i, release, proc, release + proc))
    return Instance(jobs)


class FixedDecisions:
    """Accept or decline by release position; accepted jobs displace the schedule tail."""

    name = "scripted"

    def __init__(self, accept: Sequence[bool]):
        self.accept = list(accept)
        self._seen = 0

    def decide(self, job, schedule, now) -> Decision:
        k = self._seen
        self._seen += 1
        if k >= len(self.accept) or not self.accept[k]:
            return Decision(DECLINE)
        if is_appendable(job, schedule, now):
            return Decision(ACCEPT_APPEND)
        new, affected = contention_insert(job, schedule, now)
        return Decision(ACCEPT_CONTENTION, schedule=new, affected=affected)


def tolerance(instance: Instance, params: AdversaryParams) -> float:
    procs = [j.proc for j in instance.jobs]
    return len(procs) * (params.epsilon_ticks + 1) / min(procs)


def _play(instance: Instance, pattern: Sequence[bool]) -> float:
    """Ratio when the adversary stops releasing after the first decline in ``pattern``."""
    stop = next((k for k, ok in enumerate(pattern) if not ok), None)
    released = instance if stop is None else instance.prefix(stop + 1)
    ledger, _ = run_simulation(released, FixedDecisions(pattern))
    offline = offline_optimal(released, limit=max(len(released), 20)).value
    return ledger.profit / offline


def strategy_ratios(instance: Instance) -> list[float]:
    """Ratio for declining first at position k (k = 0..n-1), then for accepting everything."""
    n = len(instance)
    out = [_play(instance, [True] * k + [False]) for k in range(n)]
    out.append(_play(instance, [True] * n))
    return out


def exhaustive_best_ratio(instance: Instance) -> float:
    n = len(instance)
    if n > EXHAUSTIVE_MAX_JOBS:
        raise AdversaryError(f"exhaustive check limited to {EXHAUSTIVE_MAX_JOBS} jobs")
    return max(_play(instance, pattern) for pattern in itertools.product((True, False), repeat=n))


def verify_upper_bound(instance: Instance, params: AdversaryParams) -> float:
    """Best ratio any online scheduler reaches on the chain; raises if it beats 1/c + tol."""
    ratios = strategy_ratios(instance)
    bound = float(1 / params.c) + tolerance(instance, params)
    for k, r in enumerate(ratios):
        if r > bound:
            raise BoundViolated(k, r, bound)
    return max(ratios)
