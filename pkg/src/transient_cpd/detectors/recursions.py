"""Online recursions for the detection statistics.

Each ``step_*`` function consumes one observation, mutates the
:class:`DetectorState` in place and returns it. States are single-stream
objects; copy them (``copy.deepcopy``) before sharing across threads.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from ..model import log_likelihood_ratio

# Recompute the MOSUM running sum from its buffer this often.
_RESUM_PERIOD = 1 << 16


class Procedure(str, Enum):
    CUSUM_V = "CusumV"
    PAGE = "PageP"
    SR = "SR"
    MOSUM = "Mosum"
    GEN_MOSUM = "GenMosum"
    FULL_LR = "FullLR"


@dataclass
class DetectorState:
    procedure: Procedure
    value: float
    aux: dict = field(default_factory=dict)
    n: int = 0


@dataclass(frozen=True)
class AlarmEvent:
    """A threshold crossing.

    ``n`` is the stopping time: the number of observations consumed when the
    alarm is raised. For MOSUM this is ``tau_S + L`` and for the generalized
    MOSUM ``tau_S + l1``.
    """

    n: int
    statistic: float
    threshold: float
    procedure: Procedure

    def to_dict(self):
        return {
            "n": self.n,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "procedure": self.procedure.value,
        }


@dataclass(frozen=True)
class Exhausted:
    """The stream ended after ``n`` observations without an alarm."""

    n: int
    statistic: Optional[float] = None


def init_state(procedure, window: Any = None):
    """Fresh state for ``procedure``.

    ``window`` is the MOSUM length ``L`` (int) or, for the generalized MOSUM,
    a :class:`~transient_cpd.model.TransientWindow`.
    """
    procedure = Procedure(procedure)
    if procedure is Procedure.CUSUM_V:
        return DetectorState(procedure, 1.0)
    if procedure in (Procedure.PAGE, Procedure.SR):
        return DetectorState(procedure, 0.0)
    if procedure is Procedure.MOSUM:
        return DetectorState(
            procedure, math.nan, {"buffer": deque(maxlen=int(window)), "sum": 0.0}
        )
    if procedure is Procedure.GEN_MOSUM:
        return DetectorState(
            procedure,
            math.nan,
            {
                "buffer": deque(maxlen=window.l1),
                "l0": window.l0,
                "l1": window.l1,
                "early": -math.inf,
            },
        )
    return DetectorState(procedure, 0.0, {"walk": 0.0})


def warmup(state):
    """Observations needed before an alarm is admissible."""
    if state.procedure is Procedure.MOSUM:
        return state.aux["buffer"].maxlen
    if state.procedure is Procedure.GEN_MOSUM:
        return state.aux["l1"]
    return 1


def step_cusum_v(state, y, spec):
    """``V_n = max(V_{n-1}, 1) * g(y)/f(y)`` with ``V_0 = 1``."""
    state.value = max(state.value, 1.0) * math.exp(log_likelihood_ratio(y, spec))
    state.n += 1
    return state


def step_page(state, y, spec):
    """Page's chart ``P_n = max(P_{n-1} + log g(y)/f(y), 0)``."""
    state.value = max(state.value + log_likelihood_ratio(y, spec), 0.0)
    state.n += 1
    return state


def step_sr(state, y, spec):
    """Shiryaev-Roberts ``R_n = (1 + R_{n-1}) * g(y)/f(y)`` with ``R_0 = 0``."""
    state.value = (1.0 + state.value) * math.exp(log_likelihood_ratio(y, spec))
    state.n += 1
    return state


def step_mosum(state, y):
    """Moving sum of the last ``L`` raw observations."""
    aux = state.aux
    buf = aux["buffer"]
    if len(buf) == buf.maxlen:
        aux["sum"] -= buf[0]
    buf.append(float(y))
    aux["sum"] += float(y)
    state.n += 1
    if state.n % _RESUM_PERIOD == 0:
        aux["sum"] = math.fsum(buf)
    state.value = aux["sum"] if len(buf) == buf.maxlen else math.nan
    return state


def step_genmosum(state, y, spec, window=None):
    """Largest centred sum over segments of length ``l0..l1`` ending now.

    Terms are ``y - mu - A/2`` without the leading factor ``A`` of the
    log-likelihood ratio, so thresholds live on the centred-sum scale.
    Segments ending before the buffer is full (lengths ``l0..n``) are
    tracked too: at ``n = l1`` the value is the maximum over every
    admissible segment inside the first ``l1`` observations, so an early
    crossing is reported at the first admissible step.
    """
    aux = state.aux
    if window is not None and (window.l0, window.l1) != (aux["l0"], aux["l1"]):
        raise ValueError("window does not match the state it is applied to")
    buf = aux["buffer"]
    buf.append(float(y) - spec.mu - 0.5 * spec.amplitude)
    state.n += 1
    l0, l1 = aux["l0"], aux["l1"]
    best = -math.inf
    acc = 0.0
    for k, term in enumerate(reversed(buf), start=1):
        acc += term
        if k >= l0 and acc > best:
            best = acc
    if state.n < l1:
        aux["early"] = max(aux["early"], best)
        state.value = math.nan
    elif state.n == l1:
        state.value = max(aux["early"], best)
    else:
        state.value = best
    return state


def step_full_lr(state, y, spec):
    """Unbounded-length statistic ``K_n`` in O(1) per step.

    ``W_n = max(W_{n-1}, 0) + llr(y_n)`` is the best log-likelihood ratio of
    a segment ending at ``n``, and ``K_n = max(K_{n-1}, W_n)`` with
    ``K_0 = 0``.
    """
    walk = max(state.aux["walk"], 0.0) + log_likelihood_ratio(y, spec)
    state.aux["walk"] = walk
    state.value = max(state.value, walk)
    state.n += 1
    return state
