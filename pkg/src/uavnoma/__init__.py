"""Coverage probability of NOMA aerial-base-station cellular networks.

Closed-form analytics (interference Laplace transforms of a Poisson UAV
field, Nakagami fading derivative sums) cross-validated against seeded
Monte Carlo simulation, for two association strategies: user-centric
(nearest-UAV attachment with one pre-attached partner) and UAV-centric
(cell-interior user pairing around the serving UAV).
"""

from .analytic_uav_centric import coverage_cond_pair, coverage_pair
from .analytic_user_centric import (
    coverage_cond,
    coverage_fixed,
    coverage_typical,
    laplace_exponent_uc,
)
from .errors import DomainError, NumericalError, PartitionCapError
from .montecarlo import (
    CoverageEstimate,
    evaluate_uav_centric,
    evaluate_user_centric,
    run_uav_centric,
    run_user_centric,
    simulate_uav_centric,
    simulate_user_centric,
    wilson_interval,
)
from .scenario import (
    INFEASIBLE,
    NOMA,
    OMA,
    UAV_CENTRIC,
    USER_CENTRIC,
    NetworkConfig,
    NomaLink,
    ThresholdSet,
    dbm_to_watts,
    noise_from_bandwidth,
    sinr_threshold,
    thresholds,
    watts_to_dbm,
)

__version__ = "0.1.0"

__all__ = [
    "CoverageEstimate",
    "DomainError",
    "INFEASIBLE",
    "NOMA",
    "NetworkConfig",
    "NomaLink",
    "NumericalError",
    "OMA",
    "PartitionCapError",
    "ThresholdSet",
    "UAV_CENTRIC",
    "USER_CENTRIC",
    "coverage_cond",
    "coverage_cond_pair",
    "coverage_fixed",
    "coverage_pair",
    "coverage_typical",
    "dbm_to_watts",
    "evaluate_uav_centric",
    "evaluate_user_centric",
    "laplace_exponent_uc",
    "noise_from_bandwidth",
    "run_uav_centric",
    "run_user_centric",
    "simulate_uav_centric",
    "simulate_user_centric",
    "sinr_threshold",
    "thresholds",
    "watts_to_dbm",
    "wilson_interval",
]
