from hypothesis import given, settings

from commitsched.adversary import AdversaryParams, gen_instance
from commitsched.baselines import UnknownPolicy, admit_all_edf_policy, feasibility_guard_policy, make_policy
from commitsched.dsc import DSCPolicy
from commitsched.engine import run_simulation
from commitsched.model import Instance, Job, Status

import pytest

from conftest import instances


def test_edf_underloaded():
    inst = Instance([Job(0, 0, 2, 10), Job(1, 0, 3, 10)])
    ledger, _ = run_simulation(inst, admit_all_edf_policy())
    assert ledger.profit == 5


def test_edf_two_identical_tight_jobs():
    inst = Instance([Job(0, 0, 5, 5), Job(1, 0, 5, 5)])
    ledger, _ = run_simulation(inst, admit_all_edf_policy())
    assert ledger.outcomes[0].status is Status.COMPLETED
    assert ledger.outcomes[1].shortage == 5
    assert ledger.profit == 0


def test_edf_loses_to_dsc_on_adversary_chain():
    inst = gen_instance(AdversaryParams("4"))
    edf, _ = run_simulation(inst, admit_all_edf_policy())
    dsc, _ = run_simulation(inst, DSCPolicy())
    assert edf.profit < dsc.profit


def test_guard_declines_infeasible_job():
    inst = Instance([Job(0, 0, 5, 5), Job(1, 1, 5, 6)])
    ledger, _ = run_simulation(inst, feasibility_guard_policy())
    assert ledger.outcomes[1].status is Status.DECLINED
    assert ledger.profit == 5


@settings(max_examples=150, deadline=None)
@given(instances())
def test_guard_never_fails_a_job(inst):
    ledger, trace = run_simulation(inst, feasibility_guard_policy(), check=True)
    assert not trace.of_kind("fail")
    assert ledger.total_shortage == 0


@settings(max_examples=100, deadline=None)
@given(instances(max_gap=30, max_slack=40))
def test_policies_agree_when_everything_appends(inst):
    probe = []

    class Spy(DSCPolicy):
        def decide(self, job, schedule, now):
            d = super().decide(job, schedule, now)
            probe.append(d.kind)
            return d

    dsc, _ = run_simulation(inst, Spy())
    if any(kind != "accept_append" for kind in probe):
        return
    profits = {run_simulation(inst, make_policy(name))[0].profit
               for name in ("admit-all-edf", "feasibility-guard")}
    assert profits == {dsc.profit} == {inst.total_work}


def test_unknown_policy():
    with pytest.raises(UnknownPolicy):
        make_policy("lifo")
