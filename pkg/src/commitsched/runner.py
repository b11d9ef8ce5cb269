"""Batch execution of policies over many instances.

Each run is a pure function of (instance, policy name, beta), so results do
not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .baselines import make_policy
from .dsc import DEFAULT_BETA
from .engine import run_simulation
from .model import Instance, empirical_ratio
from .oracle import DEFAULT_LIMIT, offline_optimal

CSV_COLUMNS = ("instance", "policy", "profit", "oracle", "ratio")


@dataclass(frozen=True)
class RunRecord:
    instance: str
    policy: str
    profit: int
    oracle: int
    ratio: Optional[float]
    digest: str
    summary: dict = field(default_factory=dict, compare=False)


def run_one(name: str, instance: Instance, policy: str, beta: float = DEFAULT_BETA,
            oracle_value: Optional[int] = None, oracle_limit: int = DEFAULT_LIMIT) -> RunRecord:
    ledger, trace = run_simulation(instance, make_policy(policy, beta))
    if oracle_value is None:
        oracle_value = offline_optimal(instance, limit=max(oracle_limit, 0)).value
    ratio = empirical_ratio(ledger.profit, oracle_value) if oracle_value > 0 else None
    return RunRecord(name, policy, ledger.profit, oracle_value, ratio, trace.digest(), ledger.summary())


def run_batch(instances: Sequence[tuple[str, Instance]], policies: Sequence[str],
              beta: float = DEFAULT_BETA, workers: int = 1,
              oracle_limit: int = DEFAULT_LIMIT) -> list[RunRecord]:
    """One record per (instance, policy), in input order."""

    def oracle_for(item):
        _, inst = item
        return offline_optimal(inst, limit=oracle_limit).value

    def task(args):
        (name, inst), value, policy = args
        return run_one(name, inst, policy, beta, oracle_value=value)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        values = list(pool.map(oracle_for, instances))
        jobs = [(item, value, policy) for item, value in zip(instances, values) for policy in policies]
        return list(pool.map(task, jobs))


@dataclass(frozen=True)
class CompetitiveReport:
    rows: list[RunRecord]

    def minima(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for row in self.rows:
            if row.ratio is None:
                continue
            out[row.policy] = min(out.get(row.policy, math.inf), row.ratio)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r.instance, r.policy, r.profit, r.oracle, "" if r.ratio is None else repr(r.ratio)])
        for policy, value in self.minima().items():
            writer.writerow(["min", policy, "", "", repr(value)])
        return buf.getvalue()


def competitive_report(instances: Sequence[tuple[str, Instance]], policies: Sequence[str],
                       beta: float = DEFAULT_BETA, workers: int = 1,
                       oracle_limit: int = DEFAULT_LIMIT) -> CompetitiveReport:
    return CompetitiveReport(run_batch(instances, policies, beta, workers, oracle_limit))
