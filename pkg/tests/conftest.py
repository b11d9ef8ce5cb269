import pytest
from hypothesis import strategies as st

from commitsched.model import Instance, Job
from commitsched.engine import TentativeSchedule, append
from commitsched.generate import adversary_corpus, random_corpus

# criterion name -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture(scope="session")
def corpus():
    """The acceptance corpus: 500 seeded random instances plus the adversary chains."""
    return random_corpus() + adversary_corpus()


def make_schedule(now, *jobs):
    """Append ``jobs`` in order to an empty schedule at time ``now``."""
    sched = TentativeSchedule(now)
    for job in jobs:
        append(job, sched, now)
    return sched


@st.composite
def instances(draw, max_jobs=10, max_gap=8, max_proc=20, max_slack=20):
    rows = draw(st.lists(
        st.tuples(st.integers(0, max_gap), st.integers(1, max_proc), st.integers(0, max_slack)),
        max_size=max_jobs,
    ))
    t = 0
    jobs = []
    for i, (gap, p, slack) in enumerate(rows):
        t += gap
        jobs.append(Job(i, t, p, t + p + slack))
    return Instance(jobs)
