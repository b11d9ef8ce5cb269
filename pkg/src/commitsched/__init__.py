"""Online deadline scheduling with admission commitment.

DSC policy, simulation engine, exact offline oracle, lower-bound adversary
and trace checks.
"""

from .adversary import AdversaryParams, gen_instance, gen_sequence, verify_upper_bound
from .analysis import busy_intervals, check_trace, interval_profits
from .baselines import AdmitAllEDF, FeasibilityGuard, make_policy
from .dsc import DEFAULT_BETA, DSCPolicy, DscConfig, dsc_decide, quote
from .engine import TentativeSchedule, run_simulation
from .model import Instance, Job, JobOutcome, ProfitLedger, Status, empirical_ratio, profit_of, validate_job
from .oracle import OracleResult, edf_feasible, interval_load_feasible, offline_optimal

__version__ = "0.1.0"

__all__ = [
    "AdmitAllEDF", "AdversaryParams", "DEFAULT_BETA", "DSCPolicy", "DscConfig", "FeasibilityGuard",
    "Instance", "Job", "JobOutcome", "OracleResult", "ProfitLedger", "Status", "TentativeSchedule",
    "busy_intervals", "check_trace", "dsc_decide", "edf_feasible", "empirical_ratio", "gen_instance",
    "gen_sequence", "interval_load_feasible", "interval_profits", "make_policy", "offline_optimal",
    "profit_of", "quote", "run_simulation", "validate_job", "verify_upper_bound",
]
