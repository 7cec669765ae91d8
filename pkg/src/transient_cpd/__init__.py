"""Online detection of transient and permanent mean shifts in Gaussian streams.

Submodules
----------
model        Gaussian change model, hypotheses and likelihood ratios.
detectors    CUSUM, Shiryaev-Roberts, MOSUM and generalized MOSUM detectors.
arl          Analytic run-length and boundary-crossing approximations.
fredholm     Integral-equation solver for CUSUM and SR run lengths.
power        Detection-power approximations for MOSUM.
montecarlo   Seeded simulation, threshold calibration and power estimates.
cli          Command-line front end.
"""

from .detectors import (
    CUSUM,
    MOSUM,
    AlarmEvent,
    Exhausted,
    FullLikelihoodRatio,
    GeneralizedMOSUM,
    ShiryaevRoberts,
    run_to_alarm,
)
from .model import (
    ChangeAt,
    GaussianChangeSpec,
    NoChange,
    TransientWindow,
    log_likelihood_ratio,
    sample_stream,
    segment_llr,
)

__version__ = "0.1.0"

__all__ = [
    "AlarmEvent",
    "CUSUM",
    "ChangeAt",
    "Exhausted",
    "FullLikelihoodRatio",
    "GaussianChangeSpec",
    "GeneralizedMOSUM",
    "MOSUM",
    "NoChange",
    "ShiryaevRoberts",
    "TransientWindow",
    "log_likelihood_ratio",
    "run_to_alarm",
    "sample_stream",
    "segment_llr",
]
