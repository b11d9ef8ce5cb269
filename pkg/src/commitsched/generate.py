"""Seeded random instances and the standard test corpus."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adversary import AdversaryParams, gen_instance
from .model import Instance, Job

CORPUS_ADVERSARY_C = ("1.5", "2", "3", "4", "5", "5.8")
CORPUS_LOADS = (0.5, 0.9, 1.5, 3.0, 6.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RandomGenConfig:
    """Geometric inter-arrivals, uniform processing times, uniform laxity.

    ``deadline = release + ceil(laxity * proc)``. When ``load_factor`` is set
    it overrides ``arrival`` so that mean work per mean gap matches it.
    """

    seed: int = 0
    n: int = 10
    arrival: float = 10.0
    proc: tuple[int, int] = (1, 50)
    laxity: tuple[float, float] = (1.0, 3.0)
    load_factor: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.proc
        if self.n < 0:
            raise ConfigError("n must be non-negative")
        if not (1 <= lo <= hi):
            raise ConfigError(f"proc range {self.proc} must satisfy 1 <= lo <= hi")
        if not (1.0 <= self.laxity[0] <= self.laxity[1]):
            raise ConfigError(f"laxity range {self.laxity} must start at 1 or more")
        if self.load_factor is not None and self.load_factor <= 0:
            raise ConfigError("load_factor must be positive")
        if self.arrival < 0:
            raise ConfigError("arrival mean must be non-negative")

    @property
    def mean_gap(self) -> float:
        if self.load_factor is not None:
            return (self.proc[0] + self.proc[1]) / 2 / self.load_factor
        return self.arrival


def generate_random(config: RandomGenConfig) -> Instance:
    rng = np.random.default_rng(config.seed)
    gap = config.mean_gap
    jobs = []
    t = 0
    for i in range(config.n):
        if i:
            # geometric on {0, 1, ...} with the requested mean
            t += int(rng.geometric(1.0 / (gap + 1.0))) - 1
        p = int(rng.integers(config.proc[0], config.proc[1] + 1))
        lax = float(rng.uniform(config.laxity[0], config.laxity[1]))
        jobs.append(Job(i, t, p, t + math.ceil(lax * p)))
    return Instance(jobs)


def realized_load(instance: Instance, config: RandomGenConfig) -> float:
    """Total work over the release span padded by one mean gap."""
    if not instance.jobs:
        return 0.0
    span = instance.jobs[-1].release - instance.jobs[0].release + max(config.mean_gap, 1.0)
    return instance.total_work / span


def random_corpus(count: int = 500, seed: int = 20111004, max_n: int = 18) -> list[Instance]:
    """Mixed under/overloaded instances with up to ``max_n`` jobs and laxity in [1, 3]."""
    master = np.random.default_rng(seed)
    out = []
    for k in range(count):
        cfg = RandomGenConfig(
            seed=int(master.integers(2**63)),
            n=int(master.integers(1, max_n + 1)),
            proc=(1, 50),
            laxity=(1.0, 3.0),
            load_factor=CORPUS_LOADS[k % len(CORPUS_LOADS)],
        )
        out.append(generate_random(cfg))
    return out


def adversary_corpus(scale: int = 10**6, epsilon: int = 1) -> list[Instance]:
    return [gen_instance(AdversaryParams(c, scale=scale, epsilon_ticks=epsilon)) for c in CORPUS_ADVERSARY_C]
