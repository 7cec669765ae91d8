"""Online detection statistics, stopping rules and batch nuisance statistics."""

from .estimators import (
    CUSUM,
    MOSUM,
    FullLikelihoodRatio,
    GeneralizedMOSUM,
    ShiryaevRoberts,
    run_to_alarm,
)
from .nuisance import batch_nuisance_stats
from .recursions import (
    AlarmEvent,
    DetectorState,
    Exhausted,
    Procedure,
    init_state,
    step_cusum_v,
    step_full_lr,
    step_genmosum,
    step_mosum,
    step_page,
    step_sr,
)

__all__ = [
    "AlarmEvent",
    "CUSUM",
    "DetectorState",
    "Exhausted",
    "FullLikelihoodRatio",
    "GeneralizedMOSUM",
    "MOSUM",
    "Procedure",
    "ShiryaevRoberts",
    "batch_nuisance_stats",
    "init_state",
    "run_to_alarm",
    "step_cusum_v",
    "step_full_lr",
    "step_genmosum",
    "step_mosum",
    "step_page",
    "step_sr",
]
