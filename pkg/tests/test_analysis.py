import dataclasses

import pytest

from commitsched.adversary import AdversaryParams, gen_instance
from commitsched.analysis import (
    BusyInterval, MalformedTrace, NotADscTrace, busy_intervals, check_declined_completed_value,
    check_lemma_capacity, check_lemma_declined, check_lemma_peace, check_lemma_shortage, check_trace,
    interval_profits,
)
from commitsched.baselines import AdmitAllEDF
from commitsched.dsc import DEFAULT_BETA, DSCPolicy
from commitsched.engine import SimulationTrace, run_simulation
from commitsched.model import Instance, Job
from commitsched.runner import competitive_report

from conftest import instances
from hypothesis import given, settings

# job 1 displaces job 0, which then fails 5 ticks short
CONTENTION = Instance([Job(0, 0, 10, 45), Job(1, 1, 40, 41)])


def analyse(inst):
    ledger, trace = run_simulation(inst, DSCPolicy())
    intervals = busy_intervals(trace)
    return ledger, trace, intervals, interval_profits(trace, inst, intervals)


def test_single_job_interval():
    _, _, intervals, _ = analyse(Instance([Job(0, 0, 5, 5)]))
    assert intervals == [BusyInterval(0, 5)]


def test_idle_gap_splits_intervals():
    _, _, intervals, _ = analyse(Instance([Job(0, 0, 3, 5), Job(1, 10, 2, 20)]))
    assert intervals == [BusyInterval(0, 3), BusyInterval(10, 12)]


def test_adversary_chain_is_one_interval():
    _, _, intervals, _ = analyse(gen_instance(AdversaryParams("4")))
    assert len(intervals) == 1 and intervals[0].start == 0


def test_peace_only_has_no_contention_profit():
    _, _, _, rows = analyse(Instance([Job(0, 0, 3, 9), Job(1, 1, 2, 9), Job(2, 20, 4, 30)]))
    assert all(row.contention == 0 for row in rows)
    assert [row.total for row in rows] == [5, 4]


def test_contention_profit_split():
    ledger, _, intervals, rows = analyse(CONTENTION)
    (row,) = rows
    assert (row.peace, row.contention, row.total) == (-5, 40, 35)
    assert row.total == row.peace + row.contention == ledger.profit
    assert row.shortages == {0: 5}
    assert intervals[0].length == 45


def test_doctored_trace_double_count():
    _, trace, _, _ = analyse(CONTENTION)
    events = list(trace.events)
    dup = next(e for e in events if e.kind == "complete")
    with pytest.raises(MalformedTrace):
        interval_profits(SimulationTrace(events + [dup]), CONTENTION)


def test_missing_outcome_is_malformed():
    _, trace, _, _ = analyse(CONTENTION)
    cut = SimulationTrace([e for e in trace.events if e.kind != "fail"])
    with pytest.raises(MalformedTrace):
        interval_profits(cut, CONTENTION)


def test_baseline_trace_is_not_dsc():
    _, trace = run_simulation(CONTENTION, AdmitAllEDF())
    with pytest.raises(NotADscTrace):
        interval_profits(trace, CONTENTION)


def test_capacity_equality_for_single_job():
    _, _, intervals, rows = analyse(Instance([Job(0, 0, 5, 5)]))
    assert check_lemma_capacity(intervals, rows, DEFAULT_BETA).passed
    assert intervals[0].length == rows[0].total


def test_capacity_sensitivity():
    _, _, intervals, rows = analyse(CONTENTION)
    assert check_lemma_capacity(intervals, rows, DEFAULT_BETA).passed
    row = rows[0]
    flipped = dataclasses.replace(row, contention=-row.contention, total=row.peace - row.contention)
    report = check_lemma_capacity(intervals, [flipped], DEFAULT_BETA)
    assert not report.passed
    assert report.violations[0]["lhs"] == 45


def test_declined_vacuous_and_sensitive():
    _, _, intervals, rows = analyse(CONTENTION)
    assert check_lemma_declined(intervals, rows, DEFAULT_BETA).passed
    far = dataclasses.replace(rows[0], declined=[(7, 10**6)])
    report = check_lemma_declined(intervals, [far], DEFAULT_BETA)
    assert not report.passed and report.violations[0]["margin"] > 0


def test_peace_containment_and_sensitivity():
    _, _, intervals, rows = analyse(CONTENTION)
    assert rows[0].failed_peace == [(0, 0, 45)]
    assert check_lemma_peace(rows, intervals).passed
    gapped = [BusyInterval(0, 20), BusyInterval(25, 45)]
    assert not check_lemma_peace(rows, gapped).passed


def test_shortage_bound_and_sensitivity():
    _, _, intervals, rows = analyse(CONTENTION)
    assert check_lemma_shortage(intervals, rows).passed
    doctored = dataclasses.replace(rows[0], shortages={0: 5, 9: 20})
    assert not check_lemma_shortage(intervals, [doctored]).passed


def test_known_counterexample_to_printed_declined_bound():
    """A genuine DSC run where the per-interval declined-deadline bound fails.

    Job 0 is displaced and ends 7 ticks short; that shortage lowers the
    interval profit by 7 but the bound's right side by (1 + beta) * 7. The
    completed-value form of the bound still holds.
    """
    inst = Instance([Job(0, 20, 10, 45), Job(1, 23, 42, 65), Job(2, 31, 30, 61),
                     Job(3, 54, 149, 208), Job(4, 56, 122, 178)])
    analysis = check_trace(run_simulation(inst, DSCPolicy())[1], inst, DEFAULT_BETA)
    by_name = {r.name: r for r in analysis.reports}
    assert not by_name["declined"].passed
    assert by_name["declined"].violations[0]["job"] == 3
    assert by_name["declined_completed_value"].passed
    assert all(by_name[n].passed for n in ("capacity", "peace", "shortage", "declined_while_busy"))


def test_completed_value_bound_sensitivity():
    _, _, intervals, rows = analyse(CONTENTION)
    assert check_declined_completed_value(intervals, rows, DEFAULT_BETA).passed
    # completed value in B is 40, so the limit is (1 + beta) * 40 past the end
    edge = 45 + int((1 + DEFAULT_BETA) * 40)
    assert check_declined_completed_value(intervals, [dataclasses.replace(rows[0], declined=[(7, edge)])],
                                          DEFAULT_BETA).passed
    report = check_declined_completed_value(intervals, [dataclasses.replace(rows[0], declined=[(7, edge + 1)])],
                                            DEFAULT_BETA)
    assert not report.passed


@settings(max_examples=150, deadline=None)
@given(instances(max_jobs=10, max_proc=40))
def test_attribution_sums_to_ledger(inst):
    ledger, trace = run_simulation(inst, DSCPolicy())
    analysis = check_trace(trace, inst, DEFAULT_BETA)
    assert analysis.total == ledger.profit
    for row in analysis.profits:
        assert row.total == row.peace + row.contention
    by_name = {r.name: r for r in analysis.reports}
    for name in ("capacity", "peace", "shortage", "declined_while_busy", "declined_completed_value"):
        assert by_name[name].passed, by_name[name]


def test_competitive_report_examples():
    inst = gen_instance(AdversaryParams("4"))
    report = competitive_report([("adv4", inst), ("contention", CONTENTION)],
                                ["dsc", "admit-all-edf", "feasibility-guard"], oracle_limit=20)
    ratio = {(r.instance, r.policy): r.ratio for r in report.rows}
    assert ratio["adv4", "admit-all-edf"] < ratio["adv4", "dsc"]
    assert all(r.ratio <= 1 for r in report.rows if r.policy == "feasibility-guard")
    assert report.minima()["dsc"] >= 3 - 2 * 2 ** 0.5 - 1e-9
    lines = report.to_csv().splitlines()
    assert lines[0] == "instance,policy,profit,oracle,ratio"
    assert len(lines) == 1 + 6 + 3
