from fractions import Fraction

import pytest

from commitsched.adversary import (
    C_SUPREMUM, OPTIMAL_RATIO, AdversaryError, AdversaryParams, AdversarySequence, BoundViolated, NonTerminating, ScaleTooSmall,
    exhaustive_best_ratio, gen_instance, gen_sequence, strategy_ratios, tolerance, verify_upper_bound,
)
from commitsched.dsc import DSCPolicy
from commitsched.engine import run_simulation
from commitsched.oracle import offline_optimal

C_VALUES = ["1.5", "2", "3", "4", "5", "5.8"]


def recursion_by_hand(c, count):
    """Lengths from the defining equalities c * (x_n - sum_{j<n} x_j) = x_{n+1}."""
    x = [Fraction(1)]
    for _ in range(count - 1):
        x.append(c * (x[-1] - sum(x[:-1])))
    return x


def test_c2_sequence():
    seq = gen_sequence(AdversaryParams("2"))
    assert seq.lengths == (1, 2)
    assert seq.ratio_terms == (Fraction(1, 2),)
    assert seq.final_term == Fraction(1, 2)


def test_c4_sequence():
    seq = gen_sequence(AdversaryParams(4))
    assert seq.lengths == (1, 4, 12, 28, 44)
    assert seq.ratio_terms == (Fraction(1, 4),) * 4
    assert seq.final_term < 0
    assert all(r == 0 for r in seq.residuals())
    assert list(seq.lengths) == recursion_by_hand(Fraction(4), 5)


@pytest.mark.parametrize("c", C_VALUES)
def test_interior_terms_equal_one_over_c(c):
    p = AdversaryParams(c)
    seq = gen_sequence(p)
    assert all(t == 1 / p.c for t in seq.ratio_terms)
    assert seq.final_term <= 1 / p.c
    assert seq.lengths[-1] <= 2 * seq.lengths[-2]
    assert all(r == 0 for r in seq.residuals())
    assert list(seq.lengths) == recursion_by_hand(p.c, len(seq.lengths))


def test_float_mode_residuals():
    seq = gen_sequence(AdversaryParams(5.8))
    assert not isinstance(seq.c, Fraction)
    for n, r in enumerate(seq.residuals()):
        assert abs(r) <= 1e-9 * abs(seq.lengths[n + 2])


def test_near_supremum_terminates():
    seq = gen_sequence(AdversaryParams("5.8", m_max=10**4))
    assert seq.m > 10
    with pytest.raises(NonTerminating):
        gen_sequence(AdversaryParams("5.8", m_max=5))


@pytest.mark.parametrize("c", [6, "5.83", 1, "0.5", C_SUPREMUM])
def test_out_of_range(c):
    with pytest.raises(AdversaryError):
        AdversaryParams(c)


def test_c2_instance():
    inst = gen_instance(AdversaryParams("2"))
    assert [(j.release, j.proc, j.deadline) for j in inst.jobs] == [(0, 10**6, 10**6), (1, 2 * 10**6, 2 * 10**6 + 1)]


def test_c4_instance_is_tight_chain():
    inst = gen_instance(AdversaryParams("4"))
    assert [j.proc for j in inst.jobs] == [x * 10**6 for x in (1, 4, 12, 28, 44)]
    assert all(j.is_tight for j in inst.jobs)


def test_scale_too_small():
    tiny = AdversarySequence(Fraction(2), (Fraction(1, 3),), (), Fraction(0))
    with pytest.raises(ScaleTooSmall):
        gen_instance(AdversaryParams("2", scale=1), tiny)


@pytest.mark.parametrize("c, expected", [("2", 0.5), ("4", 0.25)])
def test_best_ratio_is_one_over_c(c, expected):
    p = AdversaryParams(c)
    inst = gen_instance(p)
    assert verify_upper_bound(inst, p) == pytest.approx(expected, abs=tolerance(inst, p))


def test_c58_bound_close_to_optimal_ratio():
    p = AdversaryParams("5.8")
    inst = gen_instance(p)
    best = verify_upper_bound(inst, p)
    assert best <= 1 / 5.8 + tolerance(inst, p)
    assert best - OPTIMAL_RATIO < 0.006


def test_decline_ratios_follow_the_chain():
    p = AdversaryParams("4")
    inst = gen_instance(p)
    ratios = strategy_ratios(inst)
    assert ratios[0] == 0
    for k in range(1, 5):
        assert ratios[k] == pytest.approx(0.25, abs=tolerance(inst, p))
    assert ratios[-1] < 0


@pytest.mark.parametrize("c", ["1.5", "2", "3", "4", "5"])
def test_exhaustive_patterns_agree_with_decline_points(c):
    inst = gen_instance(AdversaryParams(c))
    assert exhaustive_best_ratio(inst) == max(strategy_ratios(inst))


def test_bound_violation_is_reported():
    # pretend the chain was built for a larger c than it was
    inst = gen_instance(AdversaryParams("4"))
    with pytest.raises(BoundViolated) as info:
        verify_upper_bound(inst, AdversaryParams("5"))
    assert info.value.strategy >= 1


@pytest.mark.parametrize("c", C_VALUES)
def test_dsc_beats_optimal_ratio_on_chains(c):
    inst = gen_instance(AdversaryParams(c))
    ledger, _ = run_simulation(inst, DSCPolicy())
    assert ledger.profit / offline_optimal(inst, limit=len(inst)).value >= OPTIMAL_RATIO - 1e-9
