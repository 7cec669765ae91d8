"""Scikit-learn style detectors.

Every detector follows the same life cycle::

    det = MOSUM(window=50, target_arl=5000).fit()   # or fit(null_data)
    det.transform(x)        # statistic path from a fresh start
    det.predict(x)          # 0/1 alarm flags under repeated application
    det.update(y_t)         # streaming: returns an AlarmEvent or None

``fit`` estimates ``mu``/``sigma`` from null data when they are left as
``None`` and turns ``target_arl`` into ``threshold_``. Thresholds are on the
natural scale of each statistic (ratio scale for ``V_n`` and ``R_n``, log
scale for Page's chart, raw observation units for MOSUM sums).
"""

import copy
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_positive, check_real, check_stream
from ..exceptions import ConfigurationError
from ..model import GaussianChangeSpec, TransientWindow
from . import paths
from .recursions import (
    AlarmEvent,
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


class _BaseDetector(TransformerMixin, BaseEstimator):
    """Shared fit/transform/predict/update plumbing."""

    _uses_amplitude = True
    # Observations added to the scan index to give the stopping time.
    offset_ = 0

    # -- configuration -------------------------------------------------
    def _check_threshold_params(self):
        if (self.threshold is None) == (self.target_arl is None):
            raise ConfigurationError(
                "exactly one of threshold and target_arl must be given"
            )
        if self.threshold is not None:
            check_real(self.threshold, "threshold")
        else:
            check_positive(self.target_arl, "target_arl")

    def _fit_location_scale(self, X):
        if self.mu is not None and self.sigma is not None:
            return check_real(self.mu, "mu"), check_positive(self.sigma, "sigma")
        if X is None:
            raise ConfigurationError(
                "mu and sigma must be given or estimated from null data X"
            )
        x = check_stream(X)
        mu = float(np.mean(x)) if self.mu is None else check_real(self.mu, "mu")
        if self.sigma is None:
            if x.size < 2:
                raise ConfigurationError("need at least 2 observations to fit sigma")
            sigma = float(np.std(x, ddof=1))
        else:
            sigma = check_positive(self.sigma, "sigma")
        return mu, sigma

    def fit(self, X=None, y=None):
        """Fix location/scale and the threshold; reset the streaming state.

        Parameters
        ----------
        X : array-like of shape (n,) or (n, 1), optional
            Pre-change observations, used only to estimate ``mu`` and/or
            ``sigma`` when those parameters are ``None``.
        y : None
            Ignored.

        Returns
        -------
        self
        """
        self._check_threshold_params()
        self._bind(X)
        if self.threshold is not None:
            self._check_threshold_domain(self.threshold)
            self.threshold_ = float(self.threshold)
        else:
            self.threshold_ = float(self._threshold_for_arl(float(self.target_arl)))
        self.reset()
        return self

    def _bind(self, X=None):
        """Validate parameters and fix ``mu_``, ``sigma_`` (no threshold)."""
        self._check_params()
        self.mu_, self.sigma_ = self._fit_location_scale(X)
        if self._uses_amplitude:
            self.spec_ = GaussianChangeSpec(self.mu_, float(self.amplitude), self.sigma_)
        return self

    def _check_params(self):
        if self._uses_amplitude:
            check_positive(self.amplitude, "amplitude")

    def _seed_threshold(self, target, seed=0):
        """Analytic starting point for simulation-based calibration."""
        return self._threshold_for_arl(target)

    def _check_threshold_domain(self, threshold):
        pass

    @property
    def warmup_(self):
        """Observations needed before an alarm is admissible."""
        return 1

    # -- streaming ------------------------------------------------------
    def reset(self):
        """Restart the statistic at its initial value."""
        self.state_ = self._new_state()
        self.n_seen_ = 0
        return self

    def _new_state(self):
        return init_state(self._procedure)

    def _crossed(self, state):
        return state.n >= self.warmup_ and state.value > self.threshold_

    def update(self, y):
        """Consume one observation; return an :class:`AlarmEvent` or ``None``.

        After an alarm the statistic restarts from its initial value. The
        event's ``n`` counts every observation seen since :meth:`fit`.
        """
        check_is_fitted(self, "state_")
        self._step(self.state_, float(y))
        self.n_seen_ += 1
        if self._crossed(self.state_):
            event = AlarmEvent(
                self.n_seen_, float(self.state_.value), self.threshold_, self._procedure
            )
            self.state_ = self._new_state()
            return event
        return None

    @property
    def statistic_(self):
        check_is_fitted(self, "state_")
        return self.state_.value

    # -- batch ------------------------------------------------------------
    def transform(self, X):
        """Statistic path for a stream started from the initial state.

        Entries before the warm-up (``L`` for MOSUM, ``l1`` for the
        generalized MOSUM) are NaN. No restarts are applied.
        """
        check_is_fitted(self, "threshold_")
        z = self._standardize(check_stream(X))
        kernel = self._mc_kernel()
        stat, _ = kernel.advance(z[None, :], kernel.init(1))
        out = self._from_kernel_scale(stat[0])
        out[: kernel.warmup - 1] = np.nan
        return out

    def detect(self, X, stop_on_first=False):
        """Run a fresh copy of the detector over ``X`` and list the alarms."""
        check_is_fitted(self, "threshold_")
        worker = copy.deepcopy(self).reset()
        events = []
        for y in check_stream(X, allow_empty=True):
            event = worker.update(y)
            if event is not None:
                events.append(event)
                if stop_on_first:
                    break
        return events

    def predict(self, X):
        """0/1 flags marking the observations at which alarms are raised."""
        x = check_stream(X, allow_empty=True)
        flags = np.zeros(x.shape[0], dtype=int)
        for event in self.detect(x):
            flags[event.n - 1] = 1
        return flags

    # -- hooks for the Monte Carlo engine --------------------------------
    def _standardize(self, y):
        return (y - self.mu_) / self.sigma_

    def _std_amplitude(self):
        return float(self.amplitude) / self.sigma_

    def _kernel_threshold(self, threshold):
        return float(threshold)

    def _from_kernel_scale(self, stat):
        return stat


class CUSUM(_BaseDetector):
    """CUSUM detector for a permanent shift of known size.

    Parameters
    ----------
    amplitude : float, default=1.0
        Post-change mean shift ``A`` in observation units.
    mu, sigma : float or None, default=(0.0, 1.0)
        Pre-change mean and noise scale; ``None`` means estimate in ``fit``.
    threshold : float, optional
        ``H`` on the ratio scale (``form="ratio"``, statistic ``V_n``) or the
        log scale (``form="page"``, statistic ``P_n``).
    target_arl : float, optional
        Mean run length to false alarm used to derive ``threshold_`` from the
        integral-equation solver.
    form : {"page", "ratio"}, default="page"
    """

    def __init__(
        self, amplitude=1.0, mu=0.0, sigma=1.0, threshold=None, target_arl=None,
        form="page",
    ):
        self.amplitude = amplitude
        self.mu = mu
        self.sigma = sigma
        self.threshold = threshold
        self.target_arl = target_arl
        self.form = form

    @property
    def _procedure(self):
        return Procedure.PAGE if self.form == "page" else Procedure.CUSUM_V

    def _check_params(self):
        super()._check_params()
        if self.form not in ("page", "ratio"):
            raise ConfigurationError(f"form must be 'page' or 'ratio'; got {self.form!r}")

    def _check_threshold_domain(self, threshold):
        if self.form == "ratio" and threshold <= 0:
            raise ConfigurationError("ratio-scale CUSUM threshold must be > 0")

    def _step(self, state, y):
        if self.form == "page":
            return step_page(state, y, self.spec_)
        return step_cusum_v(state, y, self.spec_)

    def _threshold_for_arl(self, target):
        from ..fredholm import threshold_for_arl

        h = threshold_for_arl("cusum", target, self._std_amplitude())
        if self.form == "ratio":
            return h
        if h <= 1.0:
            raise ConfigurationError(
                "target ARL is too small for Page's chart (needs H > 1)"
            )
        return math.log(h)

    def _mc_kernel(self):
        if self.form == "page":
            return paths.PageKernel(self._std_amplitude())
        return paths.LogCusumKernel(self._std_amplitude())

    def _kernel_threshold(self, threshold):
        return float(threshold) if self.form == "page" else math.log(threshold)

    def _from_kernel_scale(self, stat):
        return stat if self.form == "page" else np.exp(stat)


class ShiryaevRoberts(_BaseDetector):
    """Shiryaev-Roberts detector; ``threshold`` is on the ratio scale."""

    _procedure = Procedure.SR

    def __init__(self, amplitude=1.0, mu=0.0, sigma=1.0, threshold=None, target_arl=None):
        self.amplitude = amplitude
        self.mu = mu
        self.sigma = sigma
        self.threshold = threshold
        self.target_arl = target_arl

    def _check_threshold_domain(self, threshold):
        if threshold <= 0:
            raise ConfigurationError("Shiryaev-Roberts threshold must be > 0")

    def _step(self, state, y):
        return step_sr(state, y, self.spec_)

    def _threshold_for_arl(self, target):
        from ..fredholm import threshold_for_arl

        return threshold_for_arl("sr", target, self._std_amplitude())

    def _mc_kernel(self):
        return paths.LogSRKernel(self._std_amplitude())

    def _kernel_threshold(self, threshold):
        return math.log(threshold)

    def _from_kernel_scale(self, stat):
        return np.exp(stat)


class MOSUM(_BaseDetector):
    """Moving-sum detector with window ``L``.

    The statistic is the raw sum of the last ``window`` observations and
    ``threshold`` is on that scale (``H = mu L + h sigma sqrt(L)``). The shift
    size is not needed to set the threshold. ``target_arl`` refers to the
    stopping time counted in observations, i.e. it includes the ``L``
    warm-up observations.
    """

    _procedure = Procedure.MOSUM
    _uses_amplitude = False

    def __init__(self, window=10, mu=0.0, sigma=1.0, threshold=None, target_arl=None):
        self.window = window
        self.mu = mu
        self.sigma = sigma
        self.threshold = threshold
        self.target_arl = target_arl

    def _check_params(self):
        check_positive(self.window, "window", integer=True)

    def _new_state(self):
        return init_state(Procedure.MOSUM, self.window)

    @property
    def warmup_(self):
        return int(self.window)

    @property
    def offset_(self):
        return int(self.window)

    def _step(self, state, y):
        return step_mosum(state, y)

    def _threshold_for_arl(self, target):
        from ..arl import mosum_threshold_for_arl

        h = mosum_threshold_for_arl(target - self.window, self.window)
        return self.mu_ * self.window + h * self.sigma_ * math.sqrt(self.window)

    @property
    def h_(self):
        """Standardized threshold ``(H - mu L) / (sigma sqrt(L))``."""
        check_is_fitted(self, "threshold_")
        return (self.threshold_ - self.mu_ * self.window) / (
            self.sigma_ * math.sqrt(self.window)
        )

    def _mc_kernel(self):
        return paths.MosumKernel(self.window)

    def _kernel_threshold(self, threshold):
        return (threshold - self.mu_ * self.window) / self.sigma_

    def _from_kernel_scale(self, stat):
        return self.sigma_ * stat + self.mu_ * self.window

    def standardized(self, X):
        """The standardized moving sums ``xi_{n,L}`` aligned like :meth:`transform`."""
        return (self.transform(X) - self.mu_ * self.window) / (
            self.sigma_ * math.sqrt(self.window)
        )


class GeneralizedMOSUM(_BaseDetector):
    """Moving-sum detector for a transient of unknown length ``l0 <= l <= l1``.

    The statistic is the largest sum of ``y - mu - A/2`` over the trailing
    ``l0..l1`` observations; ``threshold`` is on that centred-sum scale (it
    is usually negative for long windows). Deriving a threshold from
    ``target_arl`` needs simulation and is seeded by ``random_state``.
    """

    _procedure = Procedure.GEN_MOSUM

    def __init__(
        self, l0=1, l1=10, amplitude=1.0, mu=0.0, sigma=1.0, threshold=None,
        target_arl=None, random_state=0,
    ):
        self.l0 = l0
        self.l1 = l1
        self.amplitude = amplitude
        self.mu = mu
        self.sigma = sigma
        self.threshold = threshold
        self.target_arl = target_arl
        self.random_state = random_state

    @property
    def window_(self):
        return TransientWindow(self.l0, self.l1)

    def _check_params(self):
        super()._check_params()
        TransientWindow(self.l0, self.l1)

    def _new_state(self):
        return init_state(Procedure.GEN_MOSUM, self.window_)

    @property
    def warmup_(self):
        return int(self.l1)

    @property
    def offset_(self):
        return int(self.l1)

    def _step(self, state, y):
        return step_genmosum(state, y, self.spec_)

    def _threshold_for_arl(self, target):
        from ..montecarlo import calibrate_threshold

        return calibrate_threshold(self, target, seed=self.random_state).threshold

    def _seed_threshold(self, target, seed=0):
        from ..montecarlo import genmosum_threshold_seed

        return genmosum_threshold_seed(self, target, seed=seed)

    def _mc_kernel(self):
        return paths.GenMosumKernel(self.l0, self.l1, self._std_amplitude())

    def _kernel_threshold(self, threshold):
        return float(threshold) / self.sigma_

    def _from_kernel_scale(self, stat):
        return self.sigma_ * stat


class FullLikelihoodRatio(_BaseDetector):
    """Likelihood-ratio statistic maximized over all segments, ``K_n``.

    Meant for verification-scale use; thresholds are on the log scale.
    """

    _procedure = Procedure.FULL_LR

    def __init__(
        self, amplitude=1.0, mu=0.0, sigma=1.0, threshold=None, target_arl=None,
        random_state=0,
    ):
        self.amplitude = amplitude
        self.mu = mu
        self.sigma = sigma
        self.threshold = threshold
        self.target_arl = target_arl
        self.random_state = random_state

    def _step(self, state, y):
        return step_full_lr(state, y, self.spec_)

    def _threshold_for_arl(self, target):
        from ..montecarlo import calibrate_threshold

        return calibrate_threshold(self, target, seed=self.random_state).threshold

    def _seed_threshold(self, target, seed=0):
        # K_n first exceeds H exactly when log V_n does, so the CUSUM
        # integral equation gives the threshold directly.
        from ..fredholm import threshold_for_arl

        return math.log(threshold_for_arl("cusum", target, self._std_amplitude()))

    def _mc_kernel(self):
        return paths.FullLRKernel(self._std_amplitude())


def _ensure_fitted(detector, threshold=None):
    try:
        check_is_fitted(detector, "threshold_")
    except Exception:
        detector = copy.deepcopy(detector)
        if threshold is not None:
            detector.set_params(threshold=threshold, target_arl=None)
        detector.fit()
        return detector
    if threshold is not None:
        detector = copy.deepcopy(detector)
        detector._check_threshold_domain(threshold)
        detector.threshold_ = float(threshold)
    return detector


def run_to_alarm(detector, stream, threshold=None):
    """Feed ``stream`` lazily into a fresh copy of ``detector`` until it alarms.

    Parameters
    ----------
    detector : detector estimator
        Fitted or fittable without data (``mu`` and ``sigma`` given).
    stream : iterable of float
        Observations; consumed only as far as needed.
    threshold : float, optional
        Overrides the detector's threshold.

    Returns
    -------
    AlarmEvent or Exhausted
        ``AlarmEvent.n`` is the stopping time in observations, which for
        MOSUM equals ``tau_S + L``.
    """
    det = _ensure_fitted(detector, threshold).reset()
    state = det.state_
    for y in stream:
        det._step(state, float(y))
        if det._crossed(state):
            return AlarmEvent(state.n, float(state.value), det.threshold_, det._procedure)
    return Exhausted(state.n, None if state.n == 0 else float(state.value))
